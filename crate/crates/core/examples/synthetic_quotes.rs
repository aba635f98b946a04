//! Quotes generated by the four-factor fixture with zero-mean noise: 0.5bp
//! on rates and normal vols, 0.2 vol points on Black vols, 0.5% on prices.
//!
//! `cargo run --example synthetic_quotes -- [seed] > fixtures/quotes.csv`

use polydiv::calibration::{model_values, write_quotes, InstrumentQuote, QuoteKind};
use polydiv::ljd::FourFactorParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> polydiv::Result<()> {
    let seed = std::env::args().nth(1).map_or(7, |s| s.parse().expect("integer seed"));
    let truth = FourFactorParams::fixture();
    let q = InstrumentQuote::new;
    let mut quotes = Vec::new();
    for i in 0..10 {
        quotes.push(q(QuoteKind::DivFuture, i as f64, i as f64 + 1.0, None, 0.0));
    }
    for t in [1.0, 2.0, 3.0, 5.0, 7.0, 10.0] {
        quotes.push(q(QuoteKind::SwapRate, 0.0, t, None, 0.0));
    }
    for e in [1.0, 2.0, 5.0] {
        quotes.push(q(QuoteKind::SwaptionNormalVol, e, 5.0, None, 0.0));
    }
    for t1 in [1.0, 2.0] {
        quotes.push(q(QuoteKind::DivOptionBlackVol, t1, t1 + 1.0, None, 0.0));
    }
    for e in [0.5, 1.0] {
        quotes.push(q(QuoteKind::StockOptionBsVol, e, 0.0, None, 0.0));
    }
    quotes.push(q(QuoteKind::IndexLevel, 0.0, 0.0, None, 0.0));

    let values = model_values(&truth, &quotes, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (q, v) in quotes.iter_mut().zip(values) {
        let z: f64 = StandardNormal.sample(&mut rng);
        q.value = match q.kind {
            QuoteKind::DivFuture | QuoteKind::IndexLevel => v * (1.0 + 0.005 * z),
            QuoteKind::SwapRate | QuoteKind::SwaptionNormalVol => v + 0.5e-4 * z,
            QuoteKind::DivOptionBlackVol | QuoteKind::StockOptionBsVol => v + 0.002 * z,
        };
    }
    write_quotes(std::io::stdout().lock(), &quotes)
}
