use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use tmqbf::encoder::{
    delta_with, make_params, omega_with, variable_order, ComponentLengths, EncodingParams, OmegaOptions, Sentence,
};
use tmqbf::eval::{make_input_oracle, EvalOptions, EvalStats, InputProbe, Registry};
use tmqbf::formula::{parse, render};
use tmqbf::growth::{check_bound, clog2, sentence_sample, square_sample, BoundReport, Sample};
use tmqbf::machine::{load_machine, run_trace, simulate, MachineProgram, Outcome, Symbol};
use tmqbf::recognizer::{Recognizer, RecognizerError, RecognizerReport, Verdict};

use crate::{Command, EvalArgs, InputArgs};

type Result<T> = std::result::Result<T, String>;

struct Machine {
    name: String,
    path: PathBuf,
    text: String,
    program: MachineProgram,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<Machine> {
    let text = read(path)?;
    let program = load_machine(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Machine {
        name: path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
        path: path.to_path_buf(),
        text,
        program,
    })
}

/// Machine files, with directories expanded to their `.tm` files.
fn load_all(paths: &[PathBuf]) -> Result<Vec<Machine>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| format!("{}: {e}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "tm"))
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    files.iter().map(|f| load(f)).collect()
}

fn word(m: &Machine, input: &str) -> Result<Vec<Symbol>> {
    m.program.alphabet().parse_word(input).map_err(|e| format!("input {input:?}: {e}"))
}

fn inputs(args: &InputArgs) -> Vec<String> {
    let mut out: Vec<String> = args.input.iter().filter(|s| !s.is_empty()).cloned().collect();
    if let Some(max) = args.max_len {
        for n in args.min_len.max(1)..=max {
            for bits in 0..1u64 << n {
                out.push((0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { '1' } else { '0' }).collect());
            }
        }
    }
    out
}

fn options(args: &EvalArgs) -> EvalOptions {
    let mut o = EvalOptions::default();
    if let Some(c) = args.enum_cap {
        o.enum_cap = c;
    }
    if let Some(c) = args.node_cap {
        o.node_cap = c;
    }
    o
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn sidecar_path(formula: &Path) -> PathBuf {
    let mut s = formula.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Validate { machines } => validate(&machines),
        Command::Simulate {
            machine,
            input,
            budget,
            trace,
        } => cmd_simulate(&machine, &input, budget, trace),
        Command::Compile {
            machine,
            input,
            n,
            m,
            output,
        } => cmd_compile(&machine, input.as_deref(), n, m, &output),
        Command::Eval {
            formula,
            eval,
            machine,
            input,
            m,
            json,
        } => cmd_eval(&formula, &eval, machine.as_deref(), input.as_deref(), m, json),
        Command::Check {
            machines,
            inputs,
            m,
            inject_fault,
            eval,
            report,
        } => cmd_check(&machines, &inputs, &m, inject_fault, &eval, report.as_deref()),
        Command::Stats {
            machines,
            train,
            held_out,
            m,
            report,
        } => cmd_stats(&machines, &train, &held_out, &m, report.as_deref()),
        Command::Recognize {
            machine,
            d,
            inputs,
            cross_check,
            json_report,
            eval,
        } => cmd_recognize(&machine, d, &inputs, cross_check, json_report.as_deref(), &eval),
    }
}

fn validate(paths: &[PathBuf]) -> Result<bool> {
    let mut ok = true;
    for p in paths {
        let text = read(p)?;
        match load_machine(&text) {
            Ok(prog) => println!(
                "{}: ok, {} states, {} symbols, {} instructions after normalization",
                p.display(),
                prog.state_count(),
                prog.alphabet().len(),
                prog.instructions().len()
            ),
            Err(e) => {
                ok = false;
                println!("{}: {e}", p.display());
            }
        }
    }
    Ok(ok)
}

#[derive(Serialize)]
struct SimulationReport {
    outcome: &'static str,
    steps_used: u64,
    max_head1: usize,
    max_head2: usize,
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Accepted => "accepted",
        Outcome::Rejected => "rejected",
        Outcome::BudgetExhausted => "budget_exhausted",
    }
}

fn cmd_simulate(path: &Path, input: &str, budget: u64, trace: bool) -> Result<bool> {
    let m = load(path)?;
    let x = word(&m, input)?;
    let r = simulate(&m.program, &x, budget).map_err(|e| e.to_string())?;
    if trace {
        let a = m.program.alphabet();
        for (t, c) in run_trace(&m.program, &x, r.steps_used as usize)
            .map_err(|e| e.to_string())?
            .iter()
            .enumerate()
        {
            println!("{t}: q{} head1={} head2={} tape2={}", c.state.0, c.head1, c.head2, a.render_word(c.tape2()));
        }
    }
    print!(
        "{}",
        json(&SimulationReport {
            outcome: outcome_name(r.outcome),
            steps_used: r.steps_used,
            max_head1: r.max_head1,
            max_head2: r.max_head2,
        })
    );
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    machine: String,
    kind: String,
    input: Option<String>,
    n: usize,
    m: usize,
    s: usize,
    r: usize,
    period: u128,
    instructions: usize,
    natural_length: u64,
    chi1: u64,
    chi2: u64,
    pi0: u64,
    ladder: u64,
    phi0: u64,
    chi_omega: u64,
}

fn sidecar(machine: &Machine, kind: &str, input: Option<&str>, p: &EncodingParams, l: &ComponentLengths) -> Sidecar {
    Sidecar {
        machine: machine.name.clone(),
        kind: kind.to_string(),
        input: input.map(str::to_string),
        n: p.n,
        m: p.m,
        s: p.s,
        r: p.r,
        period: p.period,
        instructions: p.instruction_count,
        natural_length: l.total,
        chi1: l.chi1,
        chi2: l.chi2,
        pi0: l.pi0,
        ladder: l.ladder,
        phi0: l.phi0,
        chi_omega: l.chi_omega,
    }
}

fn cmd_compile(path: &Path, input: Option<&str>, n: Option<usize>, m: usize, output: &Path) -> Result<bool> {
    let mach = load(path)?;
    let x = input.map(|w| word(&mach, w)).transpose()?;
    let n = x.as_ref().map_or_else(|| n.unwrap_or(0), Vec::len);
    let params = make_params(&mach.program, n, m).map_err(|e| e.to_string())?;
    let (kind, sentence): (&str, Sentence) = match &x {
        Some(x) => ("omega", omega_with(&params, x, OmegaOptions::default()).map_err(|e| e.to_string())?),
        None => ("delta", delta_with(&params, OmegaOptions::default()).map_err(|e| e.to_string())?),
    };
    let mut text = render(&sentence.formula);
    text.push('\n');
    write(output, &text)?;
    let side = sidecar(&mach, kind, input, &params, &sentence.lengths);
    write(&sidecar_path(output), &json(&side))?;
    println!(
        "{}: {} sentence, natural length {}",
        output.display(),
        kind,
        sentence.lengths.total
    );
    Ok(true)
}

#[derive(Serialize)]
struct EvalReport {
    value: bool,
    evaluator: String,
    stats: EvalStats,
}

fn cmd_eval(
    path: &Path,
    args: &EvalArgs,
    machine: Option<&Path>,
    input: Option<&str>,
    m: Option<usize>,
    as_json: bool,
) -> Result<bool> {
    let text = read(path)?;
    let formula = parse(text.trim()).map_err(|e| format!("{}: {e}", path.display()))?;
    let evaluator = Registry::default().get(&args.evaluator).map_err(|e| e.to_string())?;
    let mut opts = options(args);
    let mut probe = None;
    let side: Option<Sidecar> = fs::read_to_string(sidecar_path(path))
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok());
    if let Some(mp) = machine {
        let mach = load(mp)?;
        let x = input.map(|w| word(&mach, w)).transpose()?;
        let n = x.as_ref().map(Vec::len).or(side.as_ref().map(|s| s.n));
        let m = m.or(side.as_ref().map(|s| s.m));
        let (Some(n), Some(m)) = (n, m) else {
            return Err(format!("{}: no sidecar; pass --input and --m", path.display()));
        };
        let params = make_params(&mach.program, n, m).map_err(|e| e.to_string())?;
        opts = opts.with_order(variable_order(&params, &[0, params.period]));
        probe = x.map(|x| make_input_oracle(&params, &x));
    }
    let probe_ref = probe.as_ref().map(|p| p as &dyn InputProbe);
    let e = evaluator
        .evaluate(&formula, probe_ref, &opts)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    if as_json {
        print!(
            "{}",
            json(&EvalReport {
                value: e.value,
                evaluator: evaluator.name().to_string(),
                stats: e.stats,
            })
        );
    } else {
        println!("{}", e.value);
    }
    Ok(e.value)
}

#[derive(Serialize)]
struct CaseReport {
    index: usize,
    machine: String,
    input: String,
    m: usize,
    simulated: Option<bool>,
    formula: Option<bool>,
    agree: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct CheckReport {
    cases: Vec<CaseReport>,
    mismatches: usize,
    errors: usize,
}

fn cmd_check(
    paths: &[PathBuf],
    input_args: &InputArgs,
    ms: &[usize],
    inject_fault: bool,
    args: &EvalArgs,
    report: Option<&Path>,
) -> Result<bool> {
    let machines = load_all(paths)?;
    let evaluator = Registry::default().get(&args.evaluator).map_err(|e| e.to_string())?;
    let base = options(args);
    let words = inputs(input_args);
    let mut work = Vec::new();
    for mach in &machines {
        for &m in ms {
            for w in &words {
                work.push((mach, m, w));
            }
        }
    }
    let run = |index: usize, mach: &Machine, m: usize, w: &str| -> CaseReport {
        let mut case = CaseReport {
            index,
            machine: mach.name.clone(),
            input: w.to_string(),
            m,
            simulated: None,
            formula: None,
            agree: false,
            error: None,
        };
        let result = (|| -> Result<(bool, bool)> {
            let x = word(mach, w)?;
            let params = make_params(&mach.program, x.len(), m).map_err(|e| e.to_string())?;
            let opts = OmegaOptions {
                corrupt_final_state: inject_fault,
                ..OmegaOptions::default()
            };
            let s = omega_with(&params, &x, opts).map_err(|e| e.to_string())?;
            let eval_opts = base.clone().with_order(variable_order(&params, &[0, params.period]));
            let value = evaluator.evaluate(&s.formula, None, &eval_opts).map_err(|e| e.to_string())?;
            let sim = simulate(&mach.program, &x, 1u64 << m.min(63)).map_err(|e| e.to_string())?;
            Ok((value.value, sim.outcome == Outcome::Accepted))
        })();
        match result {
            Ok((f, s)) => {
                case.formula = Some(f);
                case.simulated = Some(s);
                case.agree = f == s;
            }
            Err(e) => case.error = Some(e),
        }
        case
    };
    let cases: Vec<CaseReport> = work
        .par_iter()
        .enumerate()
        .map(|(i, (mach, m, w))| run(i, mach, *m, w))
        .collect();
    let mismatches = cases.iter().filter(|c| c.error.is_none() && !c.agree).count();
    let errors = cases.iter().filter(|c| c.error.is_some()).count();
    for c in cases.iter().filter(|c| !c.agree) {
        match &c.error {
            Some(e) => println!("error    {} X={} m={}: {e}", c.machine, c.input, c.m),
            None => println!(
                "mismatch {} X={} m={}: formula={} simulation={}",
                c.machine,
                c.input,
                c.m,
                c.formula.unwrap_or_default(),
                c.simulated.unwrap_or_default()
            ),
        }
    }
    println!("{} cases, {mismatches} mismatches, {errors} errors", cases.len());
    let ok = mismatches == 0 && errors == 0;
    if let Some(p) = report {
        write(p, &json(&CheckReport { cases, mismatches, errors }))?;
    }
    Ok(ok)
}

#[derive(Serialize)]
struct StatsReport {
    points: Vec<Sample>,
    lower_bound_violations: Vec<Sample>,
    sum_bound: BoundReport,
    square_bound: BoundReport,
}

fn exponents(n: usize, forms: &[String]) -> Result<Vec<usize>> {
    let s = clog2(n as u64) as usize;
    let mut out = Vec::new();
    for t in forms {
        let m = match t.as_str() {
            "s" => s,
            "n" => n,
            t => match t.strip_suffix('s') {
                Some(k) => k.parse::<usize>().map_err(|_| format!("bad exponent {t:?}"))? * s,
                None => t.parse().map_err(|_| format!("bad exponent {t:?}"))?,
            },
        };
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn cmd_stats(paths: &[PathBuf], train: &[usize], held: &[usize], forms: &[String], report: Option<&Path>) -> Result<bool> {
    let machines = load_all(paths)?;
    let mut points = Vec::new();
    let (mut sum_train, mut sum_held, mut sq_train, mut sq_held) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for mach in &machines {
        for (&n, is_train) in train.iter().map(|n| (n, true)).chain(held.iter().map(|n| (n, false))) {
            for m in exponents(n, forms)? {
                let s = sentence_sample(&mach.name, &mach.program, n, m).map_err(|e| e.to_string())?;
                points.push(s.clone());
                if is_train { sum_train.push(s) } else { sum_held.push(s) }
            }
            let s = square_sample(&mach.name, &mach.program, n).map_err(|e| e.to_string())?;
            if is_train { sq_train.push(s) } else { sq_held.push(s) }
        }
    }
    let sum_bound = check_bound(sum_train, sum_held).map_err(|e| e.to_string())?;
    let square_bound = check_bound(sq_train, sq_held).map_err(|e| e.to_string())?;
    let lower_bound_violations: Vec<Sample> = points.iter().filter(|s| s.length <= s.m as u64).cloned().collect();
    for p in &points {
        println!("{} n={} m={} length={}", p.machine, p.n, p.m, p.length);
    }
    let show = |label: &str, r: &BoundReport| {
        let c: Vec<String> = r.fit.constants.iter().map(|c| format!("{c:.4}")).collect();
        println!(
            "{label}: constants [{}], held-out margin >= {:.0}, {}",
            c.join(", "),
            r.min_held_out_margin().unwrap_or(f64::NAN),
            if r.holds() { "holds" } else { "violated" }
        );
    };
    show("sum bound", &sum_bound);
    show("m = n bound", &square_bound);
    let ok = lower_bound_violations.is_empty() && sum_bound.holds() && square_bound.holds();
    if let Some(p) = report {
        let r = StatsReport {
            points,
            lower_bound_violations,
            sum_bound,
            square_bound,
        };
        write(p, &json(&r))?;
    }
    Ok(ok)
}

fn degree_line(text: &str) -> Option<usize> {
    text.lines()
        .find_map(|l| l.strip_prefix("# degree:"))
        .and_then(|d| d.trim().parse().ok())
}

#[derive(Serialize)]
struct RecognizeCase {
    input: String,
    report: Option<RecognizerReport>,
    mismatch: Option<(Verdict, Verdict)>,
}

fn cmd_recognize(
    path: &Path,
    d: Option<usize>,
    input_args: &InputArgs,
    cross_check: bool,
    report: Option<&Path>,
    args: &EvalArgs,
) -> Result<bool> {
    let mach = load(path)?;
    let d = d
        .or_else(|| degree_line(&mach.text))
        .ok_or_else(|| format!("{}: no `# degree:` line; pass --d", mach.path.display()))?;
    let evaluator = Registry::default().get(&args.evaluator).map_err(|e| e.to_string())?;
    let recognizer = Recognizer::new(evaluator, options(args));
    let mut cases = Vec::new();
    let mut ok = true;
    for w in inputs(input_args) {
        let x = word(&mach, &w)?;
        match recognizer.recognize(&mach.program, d, &x, cross_check) {
            Ok(r) => {
                println!("{w}: {:?}", r.verdict);
                cases.push(RecognizeCase {
                    input: w,
                    report: Some(r),
                    mismatch: None,
                });
            }
            Err(RecognizerError::CrossCheckMismatch { formula, oracle }) => {
                ok = false;
                println!("{w}: mismatch, formula {formula:?}, simulation {oracle:?}");
                cases.push(RecognizeCase {
                    input: w,
                    report: None,
                    mismatch: Some((formula, oracle)),
                });
            }
            Err(e) => return Err(format!("{w}: {e}")),
        }
    }
    if let Some(p) = report {
        write(p, &json(&cases))?;
    }
    Ok(ok)
}
