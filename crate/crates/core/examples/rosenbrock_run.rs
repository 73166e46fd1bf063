//! Minimal library usage: run the windowed optimizer down the Rosenbrock
//! valley and print the final loss.
//!
//! cargo run -p dwmgrad --example rosenbrock_run

use dwmgrad::objectives::Rosenbrock;
use dwmgrad::optim::{DwmGrad, DwmGradConfig};
use dwmgrad::runner::{drive, DriveOptions};
use dwmgrad::ParamVector;

fn main() -> Result<(), dwmgrad::Error> {
    let objective = Rosenbrock::new();
    let mut optimizer = DwmGrad::new(DwmGradConfig::default(), 2)?;
    let start = ParamVector::new(vec![-1.2, 1.0])?;
    let out = drive(&mut optimizer, &objective, &start, &DriveOptions {
        iterations: 1000,
        ..DriveOptions::default()
    })?;
    println!("final loss {:.3e}", out.trajectory.final_loss);
    Ok(())
}
