use std::str::FromStr;

use anyhow::{bail, Result};
use clap::ValueEnum;
use rand::Rng;

use qfp_core::budget::Budget;
use qfp_core::codes::BinaryLinearCode;
use qfp_core::fingerprint::{binary_fingerprint, BinaryString};
use qfp_core::groups::{
    max_pairwise_overlap, max_pairwise_overlap_sampled, sample_characters, AbelianGroup,
    CharacterSampling, GroupElement,
};
use qfp_core::protocol::{
    comm_cost, kparty_exact, kparty_subset_size, lin4_group, lin4_z2n, protocol1_sampled,
    repeated_protocol, sqrt_subset_size, ExactEngine, ExactOptions, Lin4Config, Lin4Outcome,
    ProtocolKind,
};
use qfp_core::sampling::{derive_seed, rng_for};
use qfp_core::Error;

use crate::report::{ExperimentReport, Record};
use crate::{Command, ModeArg};

/// `sqrt` or an explicit subset size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetSize {
    Sqrt,
    Fixed(usize),
}

impl SubsetSize {
    fn resolve(self, n: usize) -> usize {
        match self {
            SubsetSize::Sqrt => sqrt_subset_size(n),
            SubsetSize::Fixed(s) => s,
        }
    }
}

impl FromStr for SubsetSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "sqrt" {
            return Ok(SubsetSize::Sqrt);
        }
        s.parse()
            .map(SubsetSize::Fixed)
            .map_err(|_| format!("expected `sqrt` or a positive integer, got `{s}`"))
    }
}

impl std::fmt::Display for SubsetSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubsetSize::Sqrt => f.write_str("sqrt"),
            SubsetSize::Fixed(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Auto,
    Dense,
    Gf,
}

fn exact_options(engine: EngineArg, budget: &Budget, with_state: bool) -> ExactOptions {
    ExactOptions {
        engine: match engine {
            EngineArg::Auto => ExactEngine::Auto,
            EngineArg::Dense => ExactEngine::Dense,
            EngineArg::Gf => ExactEngine::GeneratingFunction,
        },
        budget: budget.tuples,
        with_state,
    }
}

fn usage(msg: String) -> anyhow::Error {
    Error::InvalidInput(msg).into()
}

/// Explicit input of length `n` (if given), or a random one from `rng`.
fn input_or_random(
    text: Option<&String>,
    n: Option<usize>,
    rng: &mut impl Rng,
    name: &str,
) -> Result<BinaryString> {
    match (text, n) {
        (Some(t), _) => {
            let x: BinaryString = t.parse()?;
            if let Some(n) = n.filter(|&n| n != x.len()) {
                return Err(usage(format!("{name} has {} bits but --n is {n}", x.len())));
            }
            Ok(x)
        }
        (None, Some(n)) => Ok(BinaryString::random(n, rng)?),
        (None, None) => Err(usage(format!("give --{name} or --n"))),
    }
}

fn parse_elements(group: &AbelianGroup, inputs: &[String]) -> Result<[GroupElement; 4]> {
    let elems = inputs
        .iter()
        .map(|t| group.parse_element(t))
        .collect::<qfp_core::Result<Vec<_>>>()?;
    elems
        .try_into()
        .map_err(|v: Vec<_>| usage(format!("expected 4 inputs, got {}", v.len())))
}

fn lin4_record(out: &Lin4Outcome) -> Record {
    let mut r = Record::new()
        .with("fingerprint_length", out.fingerprint_length)
        .with("s", out.subset_size)
        .with("acceptance", out.acceptance)
        .with("pure_acceptance", out.pure_acceptance)
        .with("equal_sum_acceptance", out.equal_sum_acceptance);
    if let Some(w) = out.worst_unequal_acceptance {
        r.push("worst_unequal_acceptance", w);
        r.push("margin", out.equal_sum_acceptance - w);
    }
    if let Some(w) = out.pure_worst_unequal_acceptance {
        r.push("pure_worst_unequal_acceptance", w);
    }
    if let Some(t) = out.threshold {
        r.push("threshold", t);
    }
    if let Some(p) = out.decide_equal_probability {
        r.push("decide_equal_probability", p);
    }
    if let Some(d) = out.decision {
        r.push("decision_equal", d);
    }
    r.with("success_probability", out.success_probability)
        .with("fidelity_12", out.fidelities[0])
        .with("fidelity_34", out.fidelities[1])
        .with("qubits_sent", out.qubits_sent)
}

pub fn execute(command: &Command, seed: u64) -> Result<ExperimentReport> {
    let budget = Budget::from_env();
    match command {
        Command::Fingerprint { input } => {
            let z: BinaryString = input.parse()?;
            let state = binary_fingerprint(&z)?;
            let mut report = ExperimentReport::new("fingerprint", seed);
            report.param("input", z);
            for (i, a) in state.amplitudes().iter().enumerate() {
                report.results.push(
                    Record::new()
                        .with("index", i)
                        .with("re", a.re)
                        .with("im", a.im),
                );
            }
            Ok(report)
        }

        Command::Protocol1 {
            n,
            s,
            x,
            y,
            mode,
            trials,
            reps,
            engine,
        } => {
            let mut rng = rng_for(seed, 0);
            let x = input_or_random(x.as_ref(), *n, &mut rng, "x")?;
            let y = input_or_random(y.as_ref(), Some(x.len()), &mut rng, "y")?;
            let n = x.len();
            let s = s.resolve(n);
            let mut report = ExperimentReport::new("protocol1", seed);
            report.param("x", &x);
            report.param("y", &y);
            report.param("s", s);
            let row = Record::new().with("n", n).with("s", s);
            let row = match mode {
                ModeArg::Exact => {
                    report.param("mode", "exact");
                    report.param("reps", reps);
                    let opts = exact_options(*engine, &budget, false);
                    let out = repeated_protocol(&x, &y, s, *reps, &opts)?;
                    let fid = out.fidelity.unwrap_or(0.0);
                    row.with("repetitions", *reps)
                        .with("success_probability", out.success_probability)
                        .with("fidelity", fid)
                        .with("one_minus_fidelity", 1.0 - fid)
                        .with("qubits_sent", out.qubits_sent)
                }
                ModeArg::Mc => {
                    report.param("mode", "mc");
                    report.param("trials", trials);
                    let out = protocol1_sampled(&x, &y, s, *trials, seed)?;
                    row.with("trials", *trials)
                        .with("successes", out.estimate.successes)
                        .with("success_probability", out.estimate.estimate)
                        .with("error_bar", out.estimate.error_bar())
                        .with("j_chi_square", out.j_chi_square)
                        .with("phase_mismatches", out.phase_mismatches)
                        .with("qubits_sent", out.outcome.qubits_sent)
                }
            };
            report.results.push(row);
            Ok(report)
        }

        Command::Kparty { k, n, s, inputs } => {
            let mut rng = rng_for(seed, 0);
            let xs: Vec<BinaryString> = if inputs.is_empty() {
                let (Some(k), Some(n)) = (k, n) else {
                    return Err(usage("give --inputs or both --k and --n".into()));
                };
                (0..*k)
                    .map(|_| BinaryString::random(*n, &mut rng))
                    .collect::<qfp_core::Result<_>>()?
            } else {
                inputs
                    .iter()
                    .map(|t| t.parse())
                    .collect::<qfp_core::Result<_>>()?
            };
            if let Some(k) = k.filter(|&k| k != xs.len()) {
                return Err(usage(format!("--k is {k} but {} inputs given", xs.len())));
            }
            let width = xs[0].len();
            if let Some(n) = n.filter(|&n| n != width) {
                return Err(usage(format!("inputs have {width} bits but --n is {n}")));
            }
            let k = xs.len();
            let s = s.map_or_else(|| kparty_subset_size(width, k), |s| s.resolve(width));
            let out = kparty_exact(&xs, s, &exact_options(EngineArg::Dense, &budget, false))?;
            let mut report = ExperimentReport::new("kparty", seed);
            report.param(
                "inputs",
                xs.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            );
            report.param("s", s);
            let fid = out.fidelity.unwrap_or(0.0);
            report.results.push(
                Record::new()
                    .with("k", k)
                    .with("n", width)
                    .with("s", s)
                    .with("success_probability", out.success_probability)
                    .with("fidelity", fid)
                    .with("one_minus_fidelity", 1.0 - fid)
                    .with("qubits_sent", out.qubits_sent),
            );
            Ok(report)
        }

        Command::Lin4 {
            code,
            inputs,
            s,
            reps,
            swap_reps,
            threshold,
            no_balance,
            engine,
        } => {
            let code = BinaryLinearCode::load(code)?;
            let xs: Vec<BinaryString> = inputs
                .iter()
                .map(|t| t.parse())
                .collect::<qfp_core::Result<_>>()?;
            let xs: [BinaryString; 4] = xs
                .try_into()
                .map_err(|v: Vec<_>| usage(format!("expected 4 inputs, got {}", v.len())))?;
            let cfg = Lin4Config {
                s: s.map(|s| s.resolve(2 * code.n_out())),
                repetitions: *reps,
                swap_reps: *swap_reps,
                threshold: *threshold,
                balance: !no_balance,
                exact: exact_options(*engine, &budget, true),
                codeword_budget: budget.codewords,
                group_budget: budget.group_elements,
                seed,
            };
            let out = lin4_z2n(&xs, &code, &cfg)?;
            let mut report = ExperimentReport::new("lin4", seed);
            report.param("inputs", inputs.join(","));
            report.param("code_length", code.n_out());
            report.param("code_distance", code.distance());
            report.param("padded", out.padded);
            report.results.push(lin4_record(&out));
            Ok(report)
        }

        Command::GroupLin4 {
            group,
            m,
            c,
            inputs,
            s,
            reps,
            swap_reps,
            threshold,
            engine,
        } => {
            let g: AbelianGroup = group.parse()?;
            let m = m.unwrap_or_else(|| g.default_m(*c));
            let chars = sample_characters(&g, m, seed, CharacterSampling::WithReplacement)?;
            let elems = parse_elements(&g, inputs)?;
            let cfg = Lin4Config {
                s: s.map(|s| s.resolve(m)),
                repetitions: *reps,
                swap_reps: *swap_reps,
                threshold: *threshold,
                exact: exact_options(*engine, &budget, true),
                codeword_budget: budget.codewords,
                group_budget: budget.group_elements,
                seed,
                ..Lin4Config::default()
            };
            let out = lin4_group(&g, &elems, &chars, &cfg)?;
            let mut report = ExperimentReport::new("group-lin4", seed);
            report.param("group", &g);
            report.param("m", m);
            report.param("inputs", inputs.join(","));
            report.results.push(lin4_record(&out));
            Ok(report)
        }

        Command::Overlap {
            group,
            m,
            c,
            seeds,
            samples,
        } => {
            let g: AbelianGroup = group.parse()?;
            let m = m.unwrap_or_else(|| g.default_m(*c));
            let mut report = ExperimentReport::new("overlap", seed);
            report.param("group", &g);
            report.param("m", m);
            report.param("seeds", seeds);
            let mut below = 0usize;
            let mut values = Vec::with_capacity(*seeds);
            for i in 0..*seeds {
                let draw = derive_seed(seed, i as u64);
                let chars = sample_characters(&g, m, draw, CharacterSampling::WithReplacement)?;
                let v = match samples {
                    Some(k) => max_pairwise_overlap_sampled(&g, &chars, *k, draw)?,
                    None => max_pairwise_overlap(&g, &chars, budget.group_elements)?,
                };
                below += usize::from(v <= 0.5);
                values.push(v);
                report.results.push(
                    Record::new()
                        .with("trial", i)
                        .with("draw_seed", draw)
                        .with("max_overlap", v),
                );
            }
            if *seeds > 0 {
                values.sort_by(f64::total_cmp);
                report
                    .summary
                    .insert("fraction_at_most_half".into(), below as f64 / *seeds as f64);
                report
                    .summary
                    .insert("median_max_overlap".into(), values[values.len() / 2]);
                report
                    .summary
                    .insert("largest_max_overlap".into(), values[values.len() - 1]);
            }
            Ok(report)
        }

        Command::Scaling { n_list, s, engine } => {
            let mut report = ExperimentReport::new("scaling", seed);
            report.param(
                "n_list",
                n_list
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            );
            report.param("s", s);
            let opts = exact_options(*engine, &budget, false);
            for (i, &n) in n_list.iter().enumerate() {
                let ss = s.resolve(n);
                let mut rng = rng_for(seed, i as u64);
                let x = BinaryString::random(n, &mut rng)?;
                let y = BinaryString::random(n, &mut rng)?;
                let out = repeated_protocol(&x, &y, ss, 1, &opts)?;
                let Some(fid) = out.fidelity else {
                    bail!(usage(format!("s = {ss} never succeeds at n = {n}")));
                };
                let predicted = (n as f64 - 2.0 * ss as f64 + 2.0) / n as f64;
                if (fid - predicted).abs() > 1e-9 {
                    return Err(Error::Invariant(format!(
                        "fidelity {fid} at n = {n}, s = {ss} differs from (n-2s+2)/n = {predicted}"
                    ))
                    .into());
                }
                let cost = comm_cost(ProtocolKind::Protocol1, n, ss, 1);
                let ratio = cost as f64 / ((n as f64).sqrt() * (n as f64).log2());
                report.results.push(
                    Record::new()
                        .with("n", n)
                        .with("s", ss)
                        .with("success_probability", out.success_probability)
                        .with("fidelity", fid)
                        .with("one_minus_fidelity", 1.0 - fid)
                        .with("predicted_fidelity", predicted)
                        .with("qubits_sent", cost)
                        .with("cost_ratio", ratio),
                );
            }
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_size_parsing() {
        assert_eq!("sqrt".parse::<SubsetSize>().unwrap(), SubsetSize::Sqrt);
        assert_eq!("5".parse::<SubsetSize>().unwrap(), SubsetSize::Fixed(5));
        assert!("five".parse::<SubsetSize>().is_err());
        assert_eq!(SubsetSize::Sqrt.resolve(25), 5);
        assert_eq!(SubsetSize::Fixed(3).resolve(25), 3);
    }
}
