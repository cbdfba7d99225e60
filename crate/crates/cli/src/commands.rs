use anyhow::{anyhow, bail, Context as _, Result};
use qfa_core::automata::{enumerate_words, member, Automaton, CutpointSpec, Gfa, Word};
use qfa_core::io::{self, AnyAutomaton};
use qfa_core::linearize::{moqfa_to_gfa, qcfa_to_gfa};
use qfa_core::opcore::{Matrix, RealMatrix};
use qfa_core::scalar::parse_rational;
use qfa_core::signrank::{
    complete_shattering, forster_bound, orthant_certificate, pfa_realization, quantum_realization,
    random_sign_matrix, rank_report, sign_matrix, spectral_norm, sylvester_hadamard, RealizationMatrix,
    SignMatrix, MAX_SHATTERING_DIM,
};
use qfa_core::stochasticize::{gfa_to_pfa, verify_conversion_exact, verify_sign_agreement_on, AgreementReport};
use qfa_core::witnesses::{
    build_moqfa_witness, build_qcfa_witness, verify_moqfa_expansion, verify_qcfa_witness, verify_shattering,
    EtaMode, WitnessGrid,
};
use qfa_core::{Rational, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::*;
use crate::context::{read_json, Context};

fn parse_cutpoint(text: &str) -> Result<f64> {
    match text.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Ok(Scalar::to_f64(&parse_rational(text)?)),
    }
}

fn parse_word(text: &str) -> Result<Word> {
    Ok(text.parse::<Word>()?)
}

fn load_automaton(path: &std::path::Path) -> Result<AnyAutomaton> {
    let doc = read_json(path)?;
    AnyAutomaton::from_json(&doc).with_context(|| format!("loading {}", path.display()))
}

/// Witness built from the shared parameters.
enum Built {
    Qcfa(qfa_core::witnesses::QcfaWitnessBundle),
    Moqfa(qfa_core::witnesses::MoqfaWitnessBundle),
}

impl Built {
    fn new(ctx: &Context, p: &WitnessParams) -> Result<Self> {
        let mode = EtaMode::parse(&p.eta, ctx.seed)?;
        Ok(match p.kind {
            WitnessKind::Qcfa => Built::Qcfa(build_qcfa_witness(p.c, p.q, mode)?),
            WitnessKind::Moqfa => Built::Moqfa(build_moqfa_witness(p.n, mode)?),
        })
    }

    fn automaton(&self) -> &dyn Automaton {
        match self {
            Built::Qcfa(b) => &b.automaton,
            Built::Moqfa(b) => &b.automaton,
        }
    }

    fn grid(&self) -> WitnessGrid {
        match self {
            Built::Qcfa(b) => b.grid(),
            Built::Moqfa(b) => b.grid(),
        }
    }

    fn d(&self) -> usize {
        match self {
            Built::Qcfa(b) => b.d,
            Built::Moqfa(b) => b.d,
        }
    }

    fn meta(&self) -> Value {
        match self {
            Built::Qcfa(b) => b.meta(),
            Built::Moqfa(b) => b.meta(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Built::Qcfa(b) => io::qcfa_witness_to_json(b),
            Built::Moqfa(b) => io::moqfa_witness_to_json(b),
        }
    }

    fn linearize(&self) -> Result<Gfa<f64>> {
        Ok(match self {
            Built::Qcfa(b) => qcfa_to_gfa(&b.automaton)?,
            Built::Moqfa(b) => moqfa_to_gfa(&b.automaton)?,
        })
    }

    /// Linearized dimension `cq²` or `n²`.
    fn linear_dim(&self) -> usize {
        match self {
            Built::Qcfa(b) => b.c * b.q * b.q,
            Built::Moqfa(b) => b.n * b.n,
        }
    }
}

pub fn witness(ctx: &Context, a: &WitnessArgs) -> Result<bool> {
    let built = Built::new(ctx, &a.params)?;
    let grid = built.grid();
    let (mut body, verified) = match &built {
        Built::Qcfa(b) => {
            let (rep, deviation) = verify_qcfa_witness(b)?;
            let ok = rep.passed();
            (json!({"shattering": rep, "max_value_deviation": deviation}), ok)
        }
        Built::Moqfa(b) => {
            let rep = verify_shattering(&b.automaton, &grid.prefixes, &grid.tests, 0.5, &grid.expected)?;
            let ok = rep.passed();
            (json!({"shattering": rep, "expansion": verify_moqfa_expansion(b)}), ok)
        }
    };
    body["witness"] = built.meta();
    body["grid"] = json!({"prefixes": grid.prefixes.len(), "tests": grid.tests.len(), "pairs": grid.pairs()});
    ctx.write_json("automaton.json", &built.to_json())?;
    ctx.report("witness", body, verified)
}

fn resolve_symbols(alphabet: &qfa_core::automata::Alphabet, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|s| alphabet.index_of(s.trim()).map_err(Into::into))
        .collect()
}

pub fn pipeline(ctx: &Context, a: &PipelineArgs) -> Result<bool> {
    let built = Built::new(ctx, &a.params)?;
    let quantum = built.automaton();
    let d = built.d();
    let gfa = built.linearize()?;
    let (pfa, conversion) = gfa_to_pfa(&gfa, &0.5)?;

    let grid = built.grid();
    let on_grid = verify_sign_agreement_on(quantum, 0.5, &pfa, 0.5, &grid.words(), ctx.tol.eq)?;
    let symbols = if a.symbols.is_empty() {
        vec![0, d]
    } else {
        resolve_symbols(quantum.alphabet(), &a.symbols)?
    };
    let words = enumerate_words(&symbols, a.max_len);
    let on_words = verify_sign_agreement_on(quantum, 0.5, &pfa, 0.5, &words, ctx.tol.eq)?;

    let dim = built.linear_dim();
    let states = json!({
        "gfa_states": gfa.states(),
        "gfa_bound": dim,
        "pfa_states": pfa.states(),
        "pfa_bound": 2 * dim + 6,
        "lower_bound_d": d,
        "within_bounds": gfa.states() <= dim && pfa.states() <= 2 * dim + 6,
        "consistent": pfa.states() >= d,
    });
    let verified = on_grid.agrees()
        && on_grid.ambiguous_count == 0
        && on_words.agrees()
        && gfa.states() == dim
        && pfa.states() == 2 * dim + 6
        && pfa.states() >= d;

    ctx.write_json("automaton.json", &built.to_json())?;
    ctx.write_json("gfa.json", &io::gfa_to_json(&gfa))?;
    ctx.write_json("pfa.json", &io::pfa_to_json(&pfa))?;
    let body = json!({
        "witness": built.meta(),
        "states": states,
        "conversion": conversion.to_json(),
        "witness_words": on_grid.to_json(),
        "sub_alphabet": symbols.iter().map(|&s| quantum.alphabet().symbol(s)).collect::<Vec<_>>(),
        "max_len": a.max_len,
        "sub_alphabet_words": on_words.to_json(),
    });
    ctx.report("pipeline", body, verified)
}

/// A real matrix from a realization report, a sign matrix or a bare array.
fn load_real_matrix(path: &std::path::Path) -> Result<RealMatrix> {
    let doc = read_json(path)?;
    if doc.get("signs").is_some() {
        return Ok(SignMatrix::from_json(&doc)?.to_real());
    }
    let rows = doc.get("matrix").unwrap_or(&doc);
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows.clone())
        .with_context(|| format!("{} holds no real matrix", path.display()))?;
    Ok(Matrix::from_rows(rows)?)
}

pub fn analyze(ctx: &Context, a: &AnalyzeArgs) -> Result<bool> {
    let s = SignMatrix::from_json(&read_json(&a.file)?)
        .with_context(|| format!("loading {}", a.file.display()))?;
    if a.forster && !s.is_square() {
        bail!(
            "--forster needs a square sign matrix, got {}x{}; extract a square submatrix first",
            s.rows(),
            s.cols()
        );
    }
    let mut body = json!({
        "rows": s.rows(),
        "cols": s.cols(),
        "spectral_norm": spectral_norm(&s),
    });
    if s.is_square() && s.rows() > 0 {
        let f = forster_bound(&s)?;
        body["forster"] = json!(f);
        body["cap"] = json!(f.cap);
    }
    let mut verified = true;
    if let Some(path) = &a.realization {
        let r = load_real_matrix(path)?;
        let real = RealizationMatrix::direct(r);
        let consistent = real.sign_consistent(&s, 0.0);
        verified &= consistent;
        body["realization"] = json!({
            "shape": [real.matrix.rows(), real.matrix.cols()],
            "sign_consistent": consistent,
            "rank": rank_report(&real.matrix, ctx.tol.rank),
        });
        let d = s.rows();
        if d > 0 && d <= MAX_SHATTERING_DIM && s.cols() == 1 << d && s.same_signs(&complete_shattering(d)?) {
            let cert = orthant_certificate(&real.matrix)?;
            verified &= cert.holds;
            body["orthant_certificate"] = json!(cert);
        }
    }
    ctx.report("analyze", body, verified)
}

fn exact_value(a: &AnyAutomaton, w: &Word) -> Result<Option<Value>> {
    Ok(match a {
        AnyAutomaton::GfaExact(g) => Some(g.evaluate(w)?.to_json()),
        AnyAutomaton::PfaExact(p) => Some(p.evaluate(w)?.to_json()),
        _ => None,
    })
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<bool> {
    let any = load_automaton(&a.file)?;
    let aut = any.as_automaton();
    let lambda = parse_cutpoint(&a.cutpoint)?;
    let spec = CutpointSpec::new(lambda).with_tolerance(ctx.tol.eq);
    let mut words = a.words.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>>>()?;
    if let Some(len) = a.max_len {
        let symbols: Vec<usize> = (0..aut.alphabet().len()).collect();
        words.extend(enumerate_words(&symbols, len).iter().map(|w| aut.alphabet().word_from_indices(w)));
    }
    let mut results = Vec::with_capacity(words.len());
    for w in &words {
        let f = aut.acceptance(w)?;
        let m = member(f, &spec);
        let mut entry = json!({"word": w.to_string(), "value": f, "accepted": m.accepted(), "ambiguous": m.ambiguous});
        if let Some(v) = exact_value(&any, w)? {
            entry["exact_value"] = v;
        }
        results.push(entry);
    }
    let body = json!({"model": any.model(), "cutpoint": lambda, "results": results});
    ctx.report("simulate", body, true)
}

pub fn linearize(ctx: &Context, a: &LinearizeArgs) -> Result<bool> {
    let any = load_automaton(&a.file)?;
    let gfa = match &any {
        AnyAutomaton::Qcfa(q) => qcfa_to_gfa(q)?,
        AnyAutomaton::Moqfa(q) => moqfa_to_gfa(q)?,
        other => bail!("linearize expects a qcfa or moqfa document, got {}", other.model()),
    };
    let aut = any.as_automaton();
    let symbols: Vec<usize> = (0..aut.alphabet().len()).collect();
    let words = enumerate_words(&symbols, a.max_len);
    let max_dev = words
        .iter()
        .map(|w| (gfa.evaluate_indices(w) - aut.acceptance_indices(w)).abs())
        .fold(0.0, f64::max);
    let verified = max_dev <= ctx.tol.eq;
    ctx.write_json("gfa.json", &io::gfa_to_json(&gfa))?;
    let body = json!({
        "model": any.model(),
        "gfa_states": gfa.states(),
        "words_checked": words.len(),
        "max_len": a.max_len,
        "max_deviation": max_dev,
    });
    ctx.report("linearize", body, verified)
}

fn gfa_to_exact(g: &Gfa<f64>) -> Result<Gfa<Rational>> {
    let conv = |x: &f64| Rational::from_f64(*x).ok_or_else(|| anyhow!("non-finite entry {x}"));
    let initial = g.initial().iter().map(conv).collect::<Result<Vec<_>>>()?;
    let fin = g.final_vector().iter().map(conv).collect::<Result<Vec<_>>>()?;
    let transitions = g
        .transitions()
        .iter()
        .map(|m| Ok(Matrix::from_rows(m.to_rows().iter().map(|r| r.iter().map(conv).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Gfa::new(g.alphabet().clone(), initial, transitions, fin)?)
}

pub fn stochasticize(ctx: &Context, a: &StochasticizeArgs) -> Result<bool> {
    let any = load_automaton(&a.file)?;
    if a.exact {
        let gfa = match any {
            AnyAutomaton::GfaExact(g) => g,
            AnyAutomaton::GfaFloat(g) => gfa_to_exact(&g)?,
            other => bail!("stochasticize expects a gfa document, got {}", other.model()),
        };
        let lambda = parse_rational(&a.cutpoint)
            .or_else(|_| {
                let x = parse_cutpoint(&a.cutpoint)?;
                Rational::from_f64(x).ok_or_else(|| anyhow!("bad cutpoint {}", a.cutpoint))
            })?;
        let (pfa, report) = gfa_to_pfa(&gfa, &lambda)?;
        let check = verify_conversion_exact(&gfa, &lambda, &pfa, &report, a.max_len);
        ctx.write_json("pfa.json", &io::pfa_to_json(&pfa))?;
        let body = json!({
            "scalar_mode": "exact",
            "cutpoint": lambda.to_json(),
            "conversion": report.to_json(),
            "max_len": a.max_len,
            "agreement": {
                "words_checked": check.words_checked,
                "sign_agreements": check.sign_agreements,
                "closed_form_matches": check.closed_form_matches,
                "first_disagreement": check.first_disagreement.as_ref().map(|w| w.to_string()),
            },
        });
        return ctx.report("stochasticize", body, check.holds());
    }
    let gfa = match any {
        AnyAutomaton::GfaFloat(g) => g,
        AnyAutomaton::GfaExact(g) => g.to_float(),
        other => bail!("stochasticize expects a gfa document, got {}", other.model()),
    };
    let lambda = parse_cutpoint(&a.cutpoint)?;
    let (pfa, report) = gfa_to_pfa(&gfa, &lambda)?;
    let symbols: Vec<usize> = (0..gfa.alphabet().len()).collect();
    let words = enumerate_words(&symbols, a.max_len);
    let agreement: AgreementReport = verify_sign_agreement_on(&gfa, lambda, &pfa, 0.5, &words, ctx.tol.eq)?;
    ctx.write_json("pfa.json", &io::pfa_to_json(&pfa))?;
    let body = json!({
        "scalar_mode": "float",
        "cutpoint": lambda,
        "conversion": report.to_json(),
        "max_len": a.max_len,
        "agreement": agreement.to_json(),
    });
    ctx.report("stochasticize", body, agreement.agrees())
}

fn grid_words(aut: &dyn Automaton) -> (Vec<Word>, Vec<Word>) {
    let pick = |prefix: &str| -> Vec<Word> {
        aut.alphabet()
            .symbols()
            .iter()
            .filter(|s| s.starts_with(prefix))
            .map(|s| Word::single(s.clone()))
            .collect()
    };
    (pick("p:"), pick("tau:"))
}

pub fn signmatrix(ctx: &Context, a: &SignmatrixArgs) -> Result<bool> {
    let mut body = json!({});
    let mut verified = true;
    let s = if let Some(d) = a.shattering {
        complete_shattering(d)?
    } else if let Some(l) = a.hadamard {
        sylvester_hadamard(l)?
    } else if let Some(l) = a.random {
        if l == 0 {
            bail!("--random needs a positive size");
        }
        random_sign_matrix(l, l, &mut ChaCha8Rng::seed_from_u64(ctx.seed))
    } else {
        let path = a
            .file
            .as_ref()
            .ok_or_else(|| anyhow!("give an automaton file or one of --shattering, --hadamard, --random"))?;
        let any = load_automaton(path)?;
        let aut = any.as_automaton();
        let lambda = parse_cutpoint(&a.cutpoint)?;
        let (xs, ys) = if a.grid {
            grid_words(aut)
        } else if let Some(len) = a.words {
            let symbols: Vec<usize> = (0..aut.alphabet().len()).collect();
            let w: Vec<Word> = enumerate_words(&symbols, len)
                .iter()
                .map(|x| aut.alphabet().word_from_indices(x))
                .collect();
            (w.clone(), w)
        } else {
            (
                a.prefixes.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>>>()?,
                a.suffixes.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>>>()?,
            )
        };
        if xs.is_empty() || ys.is_empty() {
            bail!("no prefixes or suffixes selected; use --grid, --words, or --prefix/--suffix");
        }
        let s = sign_matrix(aut, lambda, &xs, &ys)?;
        body["cutpoint"] = json!(lambda);
        body["model"] = json!(any.model());
        if a.realize {
            let real = match &any {
                AnyAutomaton::Moqfa(q) => quantum_realization(q, lambda, &xs, &ys)?,
                AnyAutomaton::PfaFloat(p) => pfa_realization(p, lambda, &xs, &ys)?,
                AnyAutomaton::PfaExact(p) => pfa_realization(p, lambda, &xs, &ys)?,
                other => bail!("--realize supports moqfa and pfa documents, got {}", other.model()),
            };
            let consistent = real.sign_consistent(&s, 0.0);
            verified &= consistent;
            body["realization"] = json!({
                "source": real.source,
                "claimed_rank_bound": real.claimed_rank_bound,
                "sign_consistent": consistent,
                "rank": rank_report(&real.matrix, ctx.tol.rank),
            });
            ctx.write_json("realization.json", &real.to_json())?;
        }
        s
    };
    body["rows"] = json!(s.rows());
    body["cols"] = json!(s.cols());
    ctx.write_json("signmatrix.json", &s.to_json())?;
    if a.csv {
        ctx.write_text("signmatrix.csv", &s.to_csv()?)?;
    }
    ctx.report("signmatrix", body, verified)
}
