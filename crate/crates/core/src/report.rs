//! Replayable JSON reports.
//!
//! A report is `{"schema": 1, "command", "input", "output"}`. Every number
//! inside `input` and `output` is written as a decimal string. Replaying a
//! report re-derives `output` from `input` (reusing any recorded search
//! result, such as a gap witness, after re-verifying it) and must reproduce
//! the file byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{subgroup_intersection, Group};
use crate::gs::{
    assemble_evidence, gs_build, gs_hk_witness, gs_intersection, minimal_noncongruence_rep,
    random_outside_hk, GsDemo, IntersectionRow, DEMO_SAMPLES,
};
use crate::modular::{
    congruence_gap_witness, coverage_level, is_congruence, low_index_reps, searches_by_name,
    verify_gap_witness, CongruenceVerdict, PermRep, WitnessOutcome,
};
use crate::profinite::{
    dcoset_method, image_of, member_at, quotient_context, thm_b_probe, tractable_at,
    DoubleCosetTarget, GroupWord, QuotientSpec, SubgroupSpec,
};

pub const SCHEMA: u64 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub input: Value,
    pub output: Value,
    /// Wall-clock time, only when requested; it is not part of the replayed
    /// content.
    pub timing_ms: Option<u64>,
}

/// Replace every JSON number by its decimal string.
pub fn stringify(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(xs) => Value::Array(xs.into_iter().map(stringify).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, stringify(v))).collect()),
        other => other,
    }
}

/// Inverse of [`stringify`] for typed decoding: strings holding a machine
/// integer become numbers. Types that keep text (matrix entries, words,
/// big integers) accept either form.
pub fn destringify(v: Value) -> Value {
    match v {
        Value::String(s) => {
            if let Ok(n) = s.parse::<u64>() {
                Value::from(n)
            } else if let Ok(n) = s.parse::<i64>() {
                Value::from(n)
            } else {
                Value::String(s)
            }
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(destringify).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, destringify(v))).collect())
        }
        other => other,
    }
}

impl Report {
    pub fn new(command: &str, input: impl Serialize, output: impl Serialize) -> Result<Self> {
        Ok(Report {
            command: command.to_string(),
            input: serde_json::to_value(input)?,
            output: serde_json::to_value(output)?,
            timing_ms: None,
        })
    }

    pub fn render(&self) -> String {
        let mut top = Map::new();
        top.insert("schema".into(), Value::from(SCHEMA));
        top.insert("command".into(), Value::String(self.command.clone()));
        top.insert("input".into(), stringify(self.input.clone()));
        top.insert("output".into(), stringify(self.output.clone()));
        if let Some(t) = self.timing_ms {
            top.insert("timing_ms".into(), Value::String(t.to_string()));
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("values serialize");
        text.push('\n');
        text
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let schema = v.get("schema").and_then(Value::as_u64);
        if schema != Some(SCHEMA) {
            return Err(Error::Invalid(format!(
                "unsupported report schema {schema:?}"
            )));
        }
        let field = |k: &str| {
            v.get(k)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("report has no {k:?}")))
        };
        let command = field("command")?
            .as_str()
            .ok_or_else(|| Error::Invalid("command is not a string".into()))?
            .to_string();
        let timing_ms = v
            .get("timing_ms")
            .and_then(Value::as_str)
            .and_then(|s| s.parse().ok());
        Ok(Report {
            command,
            input: destringify(field("input")?),
            output: destringify(field("output")?),
            timing_ms,
        })
    }
}

fn decode<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    Ok(serde_json::from_value(v.clone())?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientInput {
    pub spec: QuotientSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientOutput {
    pub order: u64,
    /// Whether the order was confirmed by enumerating the closure.
    pub enumerated: bool,
    pub generators: usize,
}

pub fn quotient(input: &QuotientInput, budget: &Budget) -> Result<QuotientOutput> {
    let ctx = quotient_context(&input.spec, budget)?;
    let known = ctx.order();
    let (order, enumerated) = match known {
        Some(n) if n > budget.closure => (n, false),
        _ => {
            let n = ctx.enumerate()?.size() as u64;
            if known.is_some_and(|k| k != n) {
                return Err(Error::Precondition(format!(
                    "closure has {n} elements, expected {known:?}"
                )));
            }
            (n, true)
        }
    };
    Ok(QuotientOutput {
        order,
        enumerated,
        generators: ctx.generators().len(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImageInput {
    pub spec: QuotientSpec,
    pub gens: Vec<GroupWord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageOutput {
    pub size: u64,
    pub generators: Vec<crate::group::SdElement>,
}

pub fn image(input: &ImageInput, budget: &Budget) -> Result<ImageOutput> {
    let ctx = quotient_context(&input.spec, budget)?;
    let im = image_of(&ctx, &input.gens)?;
    Ok(ImageOutput {
        size: im.size() as u64,
        generators: im.generators().to_vec(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntersectInput {
    pub spec: QuotientSpec,
    pub u: Vec<GroupWord>,
    pub v: Vec<GroupWord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectOutput {
    pub u_size: u64,
    pub v_size: u64,
    pub intersection_size: u64,
    pub generators: Vec<crate::group::SdElement>,
}

pub fn intersect(input: &IntersectInput, budget: &Budget) -> Result<IntersectOutput> {
    let ctx = quotient_context(&input.spec, budget)?;
    let u = image_of(&ctx, &input.u)?;
    let v = image_of(&ctx, &input.v)?;
    let cap = subgroup_intersection(&ctx, &u, &v)?;
    Ok(IntersectOutput {
        u_size: u.size() as u64,
        v_size: v.size() as u64,
        intersection_size: cap.size() as u64,
        generators: cap.generators().to_vec(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DcosetInput {
    pub target: DoubleCosetTarget,
    pub g: GroupWord,
    pub spec: QuotientSpec,
    pub method: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TractableInput {
    pub h: Vec<GroupWord>,
    pub k: Vec<GroupWord>,
    pub cap: Vec<GroupWord>,
    pub m_spec: QuotientSpec,
    pub candidates: Vec<QuotientSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeInput {
    pub h: Vec<GroupWord>,
    pub k: Vec<GroupWord>,
    pub l: SubgroupSpec,
    pub g: GroupWord,
    pub tower: Vec<QuotientSpec>,
    pub method: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowIndexInput {
    pub max_degree: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LowIndexRow {
    pub rep: PermRep,
    pub cusp_widths: Vec<usize>,
    #[serde(flatten)]
    pub verdict: CongruenceVerdict,
}

pub fn lowindex(input: &LowIndexInput, budget: &Budget) -> Result<Vec<LowIndexRow>> {
    low_index_reps(input.max_degree, budget)?
        .into_iter()
        .map(|rep| {
            let verdict = is_congruence(&rep, budget)?;
            Ok(LowIndexRow {
                cusp_widths: rep.cusp_widths(),
                rep,
                verdict,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CongruenceInput {
    pub rep: PermRep,
}

pub fn congruence(input: &CongruenceInput, budget: &Budget) -> Result<LowIndexRow> {
    Ok(LowIndexRow {
        cusp_widths: input.rep.cusp_widths(),
        verdict: is_congruence(&input.rep, budget)?,
        rep: input.rep.clone(),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapWitnessInput {
    pub rep: PermRep,
    /// Search level `L`; defaults to the coverage level of the subgroup.
    pub level: Option<u64>,
    pub m_max: u64,
    pub strategies: Vec<String>,
}

pub fn gap_witness(input: &GapWitnessInput, budget: &Budget) -> Result<WitnessOutcome> {
    let names: Vec<&str> = input.strategies.iter().map(String::as_str).collect();
    let searches = searches_by_name(&names)?;
    let level = match input.level {
        Some(l) => l,
        None => coverage_level(is_congruence(&input.rep, budget)?.level, input.m_max),
    };
    congruence_gap_witness(&input.rep, level, input.m_max, &searches, budget)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GsDemoInput {
    pub max_level: u64,
    pub seed: u64,
    pub strategies: Vec<String>,
}

pub fn gs_demo(input: &GsDemoInput, budget: &Budget) -> Result<GsDemo> {
    let names: Vec<&str> = input.strategies.iter().map(String::as_str).collect();
    let searches = searches_by_name(&names)?;
    crate::gs::gs_demo(input.max_level, input.seed, &searches, budget)
}

/// Rebuild the demo from its input and the recorded witness.
fn replay_gs_demo(input: &GsDemoInput, recorded: &GsDemo, budget: &Budget) -> Result<GsDemo> {
    use rand::SeedableRng;
    let tower: Vec<QuotientSpec> = crate::profinite::default_tower()
        .into_iter()
        .filter(|s| s.m <= input.max_level)
        .collect();
    let intersections = tower
        .iter()
        .map(|spec| {
            let inst = gs_build(spec, budget)?;
            Ok(IntersectionRow {
                m: spec.m,
                h_size: inst.im_h.size() as u64,
                k_size: inst.im_k.size() as u64,
                intersection_size: gs_intersection(&inst)?.size() as u64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(input.seed);
    let hk_certificates = (0..DEMO_SAMPLES)
        .map(|_| gs_hk_witness(&random_outside_hk(&mut rng, 9, 8), budget))
        .collect::<Result<Vec<_>>>()?;
    let evidence = match (&recorded.evidence, minimal_noncongruence_rep(7, budget)?) {
        (Some(ev), Some(rep)) if ev.rep == rep => Some(assemble_evidence(
            &rep,
            ev.witness.clone(),
            input.max_level,
            &crate::profinite::Scan,
            budget,
        )?),
        (None, None) => None,
        _ => {
            return Err(Error::Precondition(
                "recorded subgroup is not the minimal one".into(),
            ))
        }
    };
    Ok(GsDemo {
        intersections,
        hk_certificates,
        evidence,
    })
}

/// Run a command on decoded input. Searches run afresh.
pub fn run(command: &str, input: &Value, budget: &Budget) -> Result<Report> {
    let output = match command {
        "quotient" => serde_json::to_value(quotient(&decode(input)?, budget)?)?,
        "image" => serde_json::to_value(image(&decode(input)?, budget)?)?,
        "intersect" => serde_json::to_value(intersect(&decode(input)?, budget)?)?,
        "dcoset-member" => {
            let i: DcosetInput = decode(input)?;
            let method = dcoset_method(&i.method)?;
            serde_json::to_value(member_at(
                &i.target,
                &i.g,
                &i.spec,
                method.as_ref(),
                budget,
            )?)?
        }
        "tractable" => {
            let i: TractableInput = decode(input)?;
            serde_json::to_value(tractable_at(
                &i.h,
                &i.k,
                &i.cap,
                &i.m_spec,
                &i.candidates,
                budget,
            )?)?
        }
        "thm-b-probe" => {
            let i: ProbeInput = decode(input)?;
            let method = dcoset_method(&i.method)?;
            serde_json::to_value(thm_b_probe(
                &i.h,
                &i.k,
                &i.l,
                &i.g,
                &i.tower,
                method.as_ref(),
                budget,
            )?)?
        }
        "lowindex" => serde_json::to_value(lowindex(&decode(input)?, budget)?)?,
        "congruence" => serde_json::to_value(congruence(&decode(input)?, budget)?)?,
        "gap-witness" => serde_json::to_value(gap_witness(&decode(input)?, budget)?)?,
        "gs-demo" => serde_json::to_value(gs_demo(&decode(input)?, budget)?)?,
        other => {
            return Err(Error::Unknown {
                kind: "command",
                name: other.to_string(),
            })
        }
    };
    Ok(Report {
        command: command.to_string(),
        input: input.clone(),
        output,
        timing_ms: None,
    })
}

/// Re-derive a report's output without repeating searches.
pub fn replay(report: &Report, budget: &Budget) -> Result<Report> {
    let output = match report.command.as_str() {
        "gap-witness" => {
            let i: GapWitnessInput = decode(&report.input)?;
            let recorded: WitnessOutcome = decode(&report.output)?;
            if let WitnessOutcome::Found(w) = &recorded {
                verify_gap_witness(&i.rep, w, budget)?;
            }
            serde_json::to_value(recorded)?
        }
        "gs-demo" => {
            let i: GsDemoInput = decode(&report.input)?;
            let recorded: GsDemo = decode(&report.output)?;
            serde_json::to_value(replay_gs_demo(&i, &recorded, budget)?)?
        }
        // everything else is a finite evaluation without search
        other => run(other, &report.input, budget)?.output,
    };
    Ok(Report {
        command: report.command.clone(),
        input: report.input.clone(),
        output,
        timing_ms: report.timing_ms,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub command: String,
    pub identical: bool,
    /// First differing line, when the replay does not match.
    pub first_difference: Option<usize>,
}

/// Replay a rendered report and compare the bytes.
pub fn verify_text(text: &str, budget: &Budget) -> Result<VerifyOutcome> {
    let report = Report::parse(text)?;
    let again = replay(&report, budget)?.render();
    let first_difference = text
        .lines()
        .zip(again.lines())
        .position(|(a, b)| a != b)
        .or_else(|| (text != again).then(|| text.lines().count().min(again.lines().count())))
        .map(|i| i + 1);
    Ok(VerifyOutcome {
        command: report.command,
        identical: text == again,
        first_difference,
    })
}
