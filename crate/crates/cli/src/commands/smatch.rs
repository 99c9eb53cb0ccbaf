use std::io::Write;
use std::path::Path;

use abex_core::smatch::{score, score_exact_bounded, SmatchScore, TripleSet, EXACT_VARIABLE_BOUND};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{create_output, load_records, to_aug_records};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy)]
pub struct SmatchOptions {
    pub exact: bool,
    pub restarts: usize,
    pub seed: u64,
}

/// Scores the i-th graph of `a` against the i-th graph of `b` and prints
/// `idA idB F P R F1` per pair.
pub fn run(a: &Path, b: &Path, output: &Path, opts: SmatchOptions) -> Result<()> {
    let ra = to_aug_records(load_records(a)?)?;
    let rb = to_aug_records(load_records(b)?)?;
    if ra.len() != rb.len() {
        return Err(CliError::data(format!(
            "{} has {} graphs but {} has {}",
            a.display(),
            ra.len(),
            b.display(),
            rb.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lines = Vec::with_capacity(ra.len());
    for (x, y) in ra.iter().zip(&rb) {
        let (Some(gx), Some(gy)) = (&x.amr, &y.amr) else {
            return Err(CliError::data(format!(
                "records `{}` and `{}` both need a graph",
                x.id, y.id
            )));
        };
        let (tx, ty) = (TripleSet::from_graph(gx), TripleSet::from_graph(gy));
        let s: SmatchScore = if opts.exact {
            score_exact_bounded(&tx, &ty, EXACT_VARIABLE_BOUND)
                .map_err(|e| CliError::data(format!("`{}` vs `{}`: {e}", x.id, y.id)))?
        } else {
            score(&tx, &ty, opts.restarts, &mut rng)
        };
        lines.push(format!(
            "{} {} {} {:.4} {:.4} {:.4}",
            x.id, y.id, s.matched, s.precision, s.recall, s.f1
        ));
    }
    let mut out = create_output(output)?;
    for line in lines {
        writeln!(out, "{line}").map_err(|e| CliError::io(output, e))?;
    }
    out.flush().map_err(|e| CliError::io(output, e))
}
