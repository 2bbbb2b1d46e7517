//! The `E_2` page `Ext_A^{s,t}` between realized objects, chart rendering,
//! and the symbolic connectivity calculus.

use crate::cells::NamedObject;
use crate::graded::{ext_over_poly, ExtTable, GradedError, GradedModule, QMat};
use crate::lattice::{is_cotoral, LatticeError, Subgroup};
use crate::resolve::{Resolution, StageTerm};
use crate::sheaf::{SheafError, SheafObject, Summand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use thiserror::Error;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdamsError {
    #[error("no finiteness certificate: {0}")]
    Certificate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("schema version {found}, expected {expected}")]
    Schema { found: u32, expected: u32 },
    #[error("malformed chart: {0}")]
    Malformed(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

pub type Result<T> = std::result::Result<T, AdamsError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Entry {
    s: usize,
    t: i64,
    dim: usize,
}

mod entries {
    use super::Entry;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(m: &BTreeMap<(usize, i64), usize>, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<Entry> = m.iter().map(|(&(s, t), &dim)| Entry { s, t, dim }).collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, i64), usize>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(|e| ((e.s, e.t), e.dim)).collect())
    }
}

/// A window of the `E_2` page. Only nonzero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Chart {
    pub schema: u32,
    pub source: String,
    pub target: String,
    pub rank: usize,
    pub t_range: (i64, i64),
    pub s_max: usize,
    #[serde(with = "entries")]
    pub entries: BTreeMap<(usize, i64), usize>,
    /// Every entry in the window is computed.
    pub exact: bool,
    /// Only row `s = 0` is computed.
    pub truncated: bool,
}

impl E2Chart {
    pub fn empty(source: String, target: String, rank: usize, t_range: (i64, i64)) -> Self {
        Self { schema: SCHEMA, source, target, rank, t_range, s_max: 2 * rank, entries: BTreeMap::new(), exact: true, truncated: false }
    }

    pub fn get(&self, s: usize, t: i64) -> usize {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, s: usize, t: i64, dim: usize) {
        if dim == 0 {
            self.entries.remove(&(s, t));
        } else {
            self.entries.insert((s, t), dim);
        }
    }

    /// Sum of the entries with `t - s = n`.
    pub fn column_total(&self, n: i64) -> usize {
        self.entries.iter().filter(|(&(s, t), _)| t - s as i64 == n).map(|(_, d)| d).sum()
    }

    fn absorb(&mut self, table: &ExtTable) {
        for (&(s, t), &d) in &table.entries {
            let cur = self.get(s, t);
            self.set(s, t, cur + d);
        }
        self.exact &= table.certified;
    }
}

fn socle_dim(m: &GradedModule, d: i64) -> Result<usize> {
    let k = m.ring().num_gens;
    let n = m.dim(d)?;
    if k == 0 || n == 0 {
        return Ok(n);
    }
    let blocks: Vec<QMat> = (0..k).map(|i| m.act_var(i, d)).collect::<std::result::Result<_, _>>()?;
    Ok(n - QMat::vstack(&blocks, n).rank())
}

/// The source split into a part with finite keys at the trivial level and
/// positive-dimensional cells.
fn split_source(m: &SheafObject) -> Result<(SheafObject, Vec<Subgroup>)> {
    let mut finite = SheafObject::zero(m.rank);
    let mut cells = Vec::new();
    for s in &m.summands {
        match s.top_level(m.rank) {
            None => {}
            Some(l) if l.dim() == 0 => finite.summands.push(s.clone()),
            Some(_) => match s {
                Summand::Cell { h } => cells.push(h.clone()),
                Summand::Structure => cells.push(Subgroup::full(m.rank)),
                other => return Err(AdamsError::Certificate(format!("source summand {other:?} has infinite support"))),
            },
        }
    }
    Ok((finite, cells))
}

/// `Ext_A^{s,t}(src, tgt)` for `t` in `[-window, window]`.
///
/// Summands supported at the trivial level contribute
/// `⊕_F Ext_{H*(BG/F)}(V_F, e_F φ^1 tgt)`: injectives at other levels are
/// Euler-local there and receive nothing from torsion. Cells of positive
/// dimension contribute to row 0 only, through images of their top generator.
pub fn ext(src: &NamedObject, tgt: &NamedObject, window: i64) -> Result<E2Chart> {
    ext_in(src, tgt, -window, window)
}

/// `Ext_A^{s,t}(src, tgt)` for `t` in `[lo, hi]`.
pub fn ext_in(src: &NamedObject, tgt: &NamedObject, lo: i64, hi: i64) -> Result<E2Chart> {
    if lo > hi {
        return Err(AdamsError::Malformed(format!("empty window {lo}:{hi}")));
    }
    let window = lo.abs().max(hi.abs());
    if src.rank() != tgt.rank() {
        return Err(SheafError::RankMismatch(src.rank(), tgt.rank()).into());
    }
    let rank = src.rank();
    let (m, y) = (src.realize()?, tgt.realize()?);
    let mut chart = E2Chart::empty(src.to_string(), tgt.to_string(), rank, (lo, hi));
    let (finite, cells) = split_source(&m)?;
    let triv = Subgroup::trivial(rank);
    let keys = finite
        .keys(&triv)
        .finite()
        .cloned()
        .ok_or_else(|| AdamsError::Certificate("infinitely many keys at the trivial level".into()))?;
    for key in keys {
        let v = finite.component(&triv, &key, window)?;
        if !v.is_finite_length() {
            return Err(AdamsError::Certificate(format!("component at {key} is not of finite length")));
        }
        let target = y.nonlocal_component(&triv, &key, window)?;
        chart.absorb(&ext_over_poly(&v, &target, lo..=hi, window)?);
    }
    for h in cells {
        let h1 = h.identity_component();
        let top = y.component(&h1, &h, window)?;
        let c = h.codim() as i64;
        for t in lo..=hi {
            let cur = chart.get(0, t);
            chart.set(0, t, cur + socle_dim(&top, c + t)?);
        }
        chart.truncated = true;
        chart.exact = false;
    }
    Ok(chart)
}

/// `dim Hom(σ_K, σ_L)` in degree zero: `1` when `K` is cotoral in `L`.
pub fn hom0_table(pairs: &[(Subgroup, Subgroup)]) -> Result<Vec<usize>> {
    pairs.iter().map(|(k, l)| Ok(usize::from(is_cotoral(k, l)?))).collect()
}

/// Checks that every entry with `t - s < s` vanishes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VanishingError {
    #[error("vanishing line falsified: E2^({s},{t}) has dimension {dim}")]
    Falsified { s: usize, t: i64, dim: usize },
    #[error("vanishing line applies to endomorphism charts only")]
    NotApplicable,
}

pub fn vanishing_check(chart: &E2Chart) -> std::result::Result<(), VanishingError> {
    if chart.source != chart.target {
        return Err(VanishingError::NotApplicable);
    }
    match chart.entries.iter().find(|(&(s, t), _)| t - (s as i64) < s as i64) {
        Some((&(s, t), &dim)) => Err(VanishingError::Falsified { s, t, dim }),
        None => Ok(()),
    }
}

/// `algconn_H` with values in `ℤ ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ConnVal {
    Finite(i64),
    Infinite,
    /// No closed formula is available.
    Undetermined,
}

impl ConnVal {
    fn plus(self, n: i64) -> Self {
        match self {
            ConnVal::Finite(c) => ConnVal::Finite(c + n),
            other => other,
        }
    }
}

impl fmt::Display for ConnVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConnVal::Finite(c) => write!(f, "{c}"),
            ConnVal::Infinite => write!(f, "inf"),
            ConnVal::Undetermined => write!(f, "?"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityRecord {
    pub object: String,
    pub values: Vec<(Subgroup, ConnVal)>,
    /// Ext vanishes for `t - s ≤ s + algconn`.
    pub slope_one: bool,
}

/// `algconn_H` of a standard object. `E⟨K⟩` has `dim(H/K) - 1` when `K ⊆ H`
/// and `∞` otherwise; for `G/K_+`, `σ_K` and `EG/K_+` only `K ⊆ H` is known.
pub fn algconn(obj: &NamedObject, h: &Subgroup) -> Result<ConnVal> {
    let formula = |k: &Subgroup| ConnVal::Finite(h.dim() as i64 - k.dim() as i64 - 1);
    match obj {
        NamedObject::EBracket { k } => Ok(if h.contains(k) { formula(k) } else { ConnVal::Infinite }),
        NamedObject::EUniversal { k } | NamedObject::NaturalCell { k } | NamedObject::BasicCell { h: k } => {
            Ok(if h.contains(k) { formula(k) } else { ConnVal::Undetermined })
        }
        other => Err(AdamsError::Unsupported(format!("no connectivity formula for {other}"))),
    }
}

pub fn connectivity_record(obj: &NamedObject, at: &[Subgroup]) -> Result<ConnectivityRecord> {
    let values = at.iter().map(|h| Ok((h.clone(), algconn(obj, h)?))).collect::<Result<_>>()?;
    Ok(ConnectivityRecord { object: obj.to_string(), values, slope_one: true })
}

/// A stage of a resolution shape: summands with suspensions.
pub type ShapeStage = Vec<(ShapeTerm, i64)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShapeTerm {
    Object(NamedObject),
    /// Every `E⟨L⟩` with `L ⊆ within` of dimension `dim`.
    AllBrackets { within: Subgroup, dim: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("stage {stage} breaks the ladder: expected at least {expected}, found {found}")]
pub struct LadderError {
    pub stage: usize,
    pub expected: ConnVal,
    pub found: ConnVal,
}

pub fn shape_of(res: &Resolution) -> Vec<ShapeStage> {
    res.stages
        .iter()
        .map(|st| {
            st.entries
                .iter()
                .filter_map(|e| match &e.term {
                    StageTerm::Named { object, shift } => Some((ShapeTerm::Object(object.clone()), *shift)),
                    StageTerm::Remainder { within, dim, shift } => {
                        Some((ShapeTerm::AllBrackets { within: within.clone(), dim: *dim }, *shift))
                    }
                    StageTerm::Injective { .. } => None,
                })
                .collect()
        })
        .collect()
}

fn term_conn(term: &ShapeTerm, h: &Subgroup) -> Result<ConnVal> {
    match term {
        ShapeTerm::Object(o) => algconn(o, h),
        ShapeTerm::AllBrackets { within, dim } => {
            let meet = within.intersect(h)?;
            Ok(if meet.dim() >= *dim { ConnVal::Finite(h.dim() as i64 - *dim as i64 - 1) } else { ConnVal::Infinite })
        }
    }
}

/// The connectivity of `X` from a resolution `X → J_0 → J_1 → …` whose stage
/// `i` has connectivity at least `c + 2i`, with `c` that of stage 0.
pub fn propagate_connectivity(shape: &[ShapeStage], h: &Subgroup) -> Result<std::result::Result<ConnVal, LadderError>> {
    let conn = |stage: &ShapeStage| -> Result<Vec<ConnVal>> {
        stage.iter().map(|(t, shift)| Ok(term_conn(t, h)?.plus(*shift))).collect()
    };
    let Some(first) = shape.first() else { return Ok(Ok(ConnVal::Infinite)) };
    let base = conn(first)?.into_iter().min().unwrap_or(ConnVal::Infinite);
    if base == ConnVal::Undetermined {
        return Ok(Ok(ConnVal::Undetermined));
    }
    for (i, stage) in shape.iter().enumerate() {
        let expected = base.plus(2 * i as i64);
        for found in conn(stage)? {
            if found == ConnVal::Undetermined || found < expected {
                return Ok(Err(LadderError { stage: i, expected, found }));
            }
        }
    }
    Ok(Ok(base))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartFormat {
    Ascii,
    Json,
    Svg,
}

impl std::str::FromStr for ChartFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ascii" => Ok(Self::Ascii),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(format!("unknown chart format {other:?}")),
        }
    }
}

/// Column range `n = t - s` covered by the window.
fn columns(chart: &E2Chart) -> (i64, i64) {
    (chart.t_range.0 - chart.s_max as i64, chart.t_range.1)
}

pub fn emit_chart(chart: &E2Chart, format: ChartFormat) -> String {
    match format {
        ChartFormat::Json => serde_json::to_string_pretty(chart).expect("charts serialize"),
        ChartFormat::Ascii => ascii(chart),
        ChartFormat::Svg => svg(chart),
    }
}

fn ascii(chart: &E2Chart) -> String {
    let (lo, hi) = columns(chart);
    let mut out = String::new();
    let flags = match (chart.exact, chart.truncated) {
        (_, true) => " [row 0 only]",
        (false, false) => " [uncertified]",
        _ => "",
    };
    let _ = writeln!(out, "E2 {} -> {}  rank {}  t in [{}, {}]{}", chart.source, chart.target, chart.rank, chart.t_range.0, chart.t_range.1, flags);
    for s in (0..=chart.s_max).rev() {
        let _ = write!(out, "{s:>3} |");
        for n in lo..=hi {
            let d = chart.get(s, n + s as i64);
            if d == 0 {
                out.push_str("  .");
            } else {
                let _ = write!(out, "{d:>3}");
            }
        }
        out.push('\n');
    }
    let _ = write!(out, "    +");
    for n in lo..=hi {
        let _ = write!(out, "{n:>3}");
    }
    out.push('\n');
    out
}

fn svg(chart: &E2Chart) -> String {
    let (lo, hi) = columns(chart);
    let cell = 24;
    let width = (hi - lo + 2) * cell;
    let height = (chart.s_max as i64 + 2) * cell;
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\">\n");
    for (&(s, t), &d) in &chart.entries {
        let n = t - s as i64;
        let x = (n - lo + 1) * cell;
        let y = (chart.s_max as i64 - s as i64) * cell + cell / 2;
        let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"6\"/><text x=\"{}\" y=\"{}\" font-size=\"10\">{d}</text>", x + 7, y - 7);
    }
    for n in lo..=hi {
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" font-size=\"9\">{n}</text>", (n - lo + 1) * cell - 4, height - 4);
    }
    out.push_str("</svg>\n");
    out
}

/// Parse a json chart, rejecting other schema versions.
pub fn load_chart(text: &str) -> Result<E2Chart> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| AdamsError::Malformed(e.to_string()))?;
    let found = raw.get("schema").and_then(|v| v.as_u64()).ok_or_else(|| AdamsError::Malformed("missing schema".into()))? as u32;
    if found != SCHEMA {
        return Err(AdamsError::Schema { found, expected: SCHEMA });
    }
    serde_json::from_value(raw).map_err(|e| AdamsError::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests;
