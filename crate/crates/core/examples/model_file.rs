//! Writes the four-factor fixture as a model file and reads it back.
//!
//! `cargo run --example model_file > fixtures/four_factor.txt`

use polydiv::ljd::{spec_from_text, spec_to_text, FourFactorParams};

fn main() -> polydiv::Result<()> {
    let spec = FourFactorParams::fixture().to_spec()?;
    let text = spec_to_text(&spec);
    assert_eq!(spec_from_text(&text)?, spec);
    print!("{text}");
    Ok(())
}
