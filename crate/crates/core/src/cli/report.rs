//! Run reports.
//!
//! The machine form is one `key=value` pair per line in a fixed key order.
//! Reals are printed at round-trip precision, so serializing, parsing and
//! serializing again reproduces the same bytes. Everything except
//! `wall_time_us` and `version` is a pure function of the invocation.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::algebra::text::{format_inline, format_real, parse_inline, parse_real};
use crate::algebra::AlgebraElement;
use crate::contraction::{ContractionReport, ContractionWitness};
use crate::metric::{Axiom, AxiomRecord, AxiomReport, AxiomWitness};
use crate::point::Point;
use crate::solver::{FixedPointResult, UniquenessReport};

pub const FORMAT_TAG: &str = "cstar-report/1";

/// Keys that vary between otherwise identical runs.
pub const VOLATILE_KEYS: [&str; 2] = ["version", "wall_time_us"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportSection {
    pub name: String,
    pub description: String,
    pub norm_a: f64,
    pub axioms: Option<AxiomReport>,
    pub contraction: Option<ContractionReport>,
    pub solve: Option<FixedPointResult>,
    pub uniqueness: Option<UniquenessReport>,
    /// Set when the section stopped on an error (divergence).
    pub error: Option<String>,
}

impl ReportSection {
    pub fn new(name: impl Into<String>, description: impl Into<String>, norm_a: f64) -> Self {
        Self {
            name: one_line(name.into()),
            description: one_line(description.into()),
            norm_a,
            axioms: None,
            contraction: None,
            solve: None,
            uniqueness: None,
            error: None,
        }
    }

    /// Verification failures: any axiom or contraction failure, a solve that
    /// did not reach `conv_tol`, or inconsistent limits.
    pub fn has_failures(&self) -> bool {
        self.axioms.as_ref().is_some_and(|a| !a.passed())
            || self.contraction.as_ref().is_some_and(|c| !c.passed())
            || self.solve.as_ref().is_some_and(|s| !s.converged)
            || self.uniqueness.as_ref().is_some_and(|u| !u.consistent)
    }
}

fn one_line(s: String) -> String {
    s.replace(['\n', '\r'], " ")
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub instance: String,
    pub seed: u64,
    pub samples: usize,
    pub max_iter: usize,
    pub conv_tol: f64,
    pub sections: Vec<ReportSection>,
    pub exit_code: i32,
    pub wall_time_us: u128,
}

// ---------------------------------------------------------------------------
// serialization

struct Writer(Vec<(String, String)>);

impl Writer {
    fn put(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    fn real(&mut self, key: impl Into<String>, v: f64) {
        self.put(key, format_real(v));
    }
}

fn format_point(p: &Point) -> String {
    p.coords().iter().map(|&c| format_real(c)).collect::<Vec<_>>().join(" ")
}

fn write_solve(w: &mut Writer, prefix: &str, r: &FixedPointResult) {
    w.put(format!("{prefix}.point"), format_point(&r.point));
    w.put(format!("{prefix}.iterations"), r.iterations);
    w.real(format!("{prefix}.residual_norm"), r.residual_norm);
    w.real(format!("{prefix}.apriori_bound"), r.apriori_bound);
    w.real(format!("{prefix}.aposteriori_bound"), r.aposteriori_bound);
    w.put(format!("{prefix}.converged"), r.converged);
    w.real(format!("{prefix}.norm_a"), r.norm_a);
    w.real(format!("{prefix}.d0_norm"), r.d0_norm);
}

fn write_axiom(w: &mut Writer, prefix: &str, rec: &AxiomRecord) {
    w.put(format!("{prefix}.checked"), rec.checked);
    w.put(format!("{prefix}.failures"), rec.failures);
    w.put(format!("{prefix}.witnesses"), rec.witnesses.len());
    for (i, wit) in rec.witnesses.iter().enumerate() {
        let p = format!("{prefix}.witness.{i}");
        w.put(format!("{p}.points"), wit.points.len());
        for (j, pt) in wit.points.iter().enumerate() {
            w.put(format!("{p}.point.{j}"), format_point(pt));
        }
        w.put(format!("{p}.values"), wit.values.len());
        for (j, v) in wit.values.iter().enumerate() {
            w.put(format!("{p}.value.{j}"), format_inline(v));
        }
    }
}

impl RunReport {
    fn pairs(&self) -> Vec<(String, String)> {
        let mut w = Writer(Vec::new());
        w.put("format", FORMAT_TAG);
        w.put("version", &self.version);
        w.put("command", &self.command);
        w.put("instance", &self.instance);
        w.put("seed", self.seed);
        w.put("samples", self.samples);
        w.put("max_iter", self.max_iter);
        w.real("conv_tol", self.conv_tol);
        w.put("sections", self.sections.len());
        for (i, s) in self.sections.iter().enumerate() {
            let p = format!("section.{i}");
            w.put(format!("{p}.name"), &s.name);
            w.put(format!("{p}.description"), &s.description);
            w.real(format!("{p}.norm_a"), s.norm_a);
            if let Some(a) = &s.axioms {
                w.put(format!("{p}.axioms"), true);
                for axiom in Axiom::ALL {
                    write_axiom(&mut w, &format!("{p}.axioms.{}", axiom.name()), a.record(axiom));
                }
            }
            if let Some(c) = &s.contraction {
                let q = format!("{p}.contraction");
                w.put(format!("{q}.checked"), c.checked);
                w.put(format!("{q}.failures"), c.failures);
                w.put(format!("{q}.witnesses"), c.witnesses.len());
                for (j, wit) in c.witnesses.iter().enumerate() {
                    let r = format!("{q}.witness.{j}");
                    w.put(format!("{r}.x"), format_point(&wit.x));
                    w.put(format!("{r}.y"), format_point(&wit.y));
                    w.put(format!("{r}.image_distance"), format_inline(&wit.image_distance));
                    w.put(format!("{r}.sandwiched_distance"), format_inline(&wit.sandwiched_distance));
                }
            }
            if let Some(r) = &s.solve {
                w.put(format!("{p}.solve"), true);
                write_solve(&mut w, &format!("{p}.solve"), r);
            }
            if let Some(u) = &s.uniqueness {
                let q = format!("{p}.uniqueness");
                w.put(format!("{q}.starts"), u.results.len());
                for (j, r) in u.results.iter().enumerate() {
                    write_solve(&mut w, &format!("{q}.result.{j}"), r);
                }
                w.real(format!("{q}.max_pairwise_dnorm"), u.max_pairwise_dnorm);
                w.put(format!("{q}.consistent"), u.consistent);
            }
            if let Some(e) = &s.error {
                w.put(format!("{p}.error"), one_line(e.clone()));
            }
        }
        w.put("exit_code", self.exit_code);
        w.put("wall_time_us", self.wall_time_us);
        w.0
    }

    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.pairs() {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    /// Machine form with the volatile keys removed.
    pub fn to_machine_stable(&self) -> String {
        strip_volatile(&self.to_machine())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "cstar {} | {} {} | seed {} | samples {} | conv_tol {:e}",
            self.version, self.command, self.instance, self.seed, self.samples, self.conv_tol
        );
        for s in &self.sections {
            let _ = writeln!(out, "\n== {} ({})", s.name, s.description);
            let _ = writeln!(out, "  ||A|| = {}  factor ||A||^2 = {}", s.norm_a, s.norm_a * s.norm_a);
            if let Some(a) = &s.axioms {
                for axiom in Axiom::ALL {
                    let rec = a.record(axiom);
                    let status = if rec.failures == 0 { "ok" } else { "FAIL" };
                    let _ = writeln!(
                        out,
                        "  axiom {:<10} {:>4}  {}/{} failing",
                        axiom.name(),
                        status,
                        rec.failures,
                        rec.checked
                    );
                    for wit in &rec.witnesses {
                        let pts: Vec<String> = wit.points.iter().map(|p| format!("({})", format_point(p))).collect();
                        let vals: Vec<String> = wit.values.iter().map(format_inline).collect();
                        let _ = writeln!(out, "    witness {} -> {}", pts.join(", "), vals.join(", "));
                    }
                }
            }
            if let Some(c) = &s.contraction {
                let status = if c.passed() { "ok" } else { "FAIL" };
                let _ = writeln!(out, "  {:<16} {status:>4}  {}/{} failing", "contraction", c.failures, c.checked);
                for wit in &c.witnesses {
                    let _ = writeln!(
                        out,
                        "    witness x=({}) y=({}): d(Tx,Ty)={} vs A*dA={}",
                        format_point(&wit.x),
                        format_point(&wit.y),
                        format_inline(&wit.image_distance),
                        format_inline(&wit.sandwiched_distance)
                    );
                }
            }
            if let Some(r) = &s.solve {
                let _ = writeln!(
                    out,
                    "  solve: {} after {} iterations, point ({})",
                    if r.converged { "converged" } else { "NOT converged" },
                    r.iterations,
                    format_point(&r.point)
                );
                let _ = writeln!(
                    out,
                    "    residual {:e}  a posteriori {:e}  a priori {:e}",
                    r.residual_norm, r.aposteriori_bound, r.apriori_bound
                );
            }
            if let Some(u) = &s.uniqueness {
                let _ = writeln!(
                    out,
                    "  uniqueness: {} starts, max pairwise ||d|| {:e}, {}",
                    u.results.len(),
                    u.max_pairwise_dnorm,
                    if u.consistent { "consistent" } else { "INCONSISTENT" }
                );
            }
            if let Some(e) = &s.error {
                let _ = writeln!(out, "  error: {e}");
            }
        }
        let _ = writeln!(out, "\nexit code {}  ({} us)", self.exit_code, self.wall_time_us);
        out
    }

    pub fn from_machine(text: &str) -> Result<Self, String> {
        let doc = Doc::parse(text)?;
        if doc.str("format")? != FORMAT_TAG {
            return Err(format!("unsupported report format `{}`", doc.str("format")?));
        }
        let n_sections: usize = doc.num("sections")?;
        let mut sections = Vec::with_capacity(n_sections);
        for i in 0..n_sections {
            let p = format!("section.{i}");
            let mut s = ReportSection::new(
                doc.str(&format!("{p}.name"))?,
                doc.str(&format!("{p}.description"))?,
                doc.real(&format!("{p}.norm_a"))?,
            );
            if doc.has(&format!("{p}.axioms")) {
                let mut a = AxiomReport::default();
                for axiom in Axiom::ALL {
                    *a.record_mut(axiom) = read_axiom(&doc, &format!("{p}.axioms.{}", axiom.name()), axiom)?;
                }
                s.axioms = Some(a);
            }
            let q = format!("{p}.contraction");
            if doc.has(&format!("{q}.checked")) {
                let n_wit: usize = doc.num(&format!("{q}.witnesses"))?;
                let witnesses = (0..n_wit)
                    .map(|j| {
                        let r = format!("{q}.witness.{j}");
                        Ok(ContractionWitness {
                            x: doc.point(&format!("{r}.x"))?,
                            y: doc.point(&format!("{r}.y"))?,
                            image_distance: doc.matrix(&format!("{r}.image_distance"))?,
                            sandwiched_distance: doc.matrix(&format!("{r}.sandwiched_distance"))?,
                        })
                    })
                    .collect::<Result<_, String>>()?;
                s.contraction = Some(ContractionReport {
                    checked: doc.num(&format!("{q}.checked"))?,
                    failures: doc.num(&format!("{q}.failures"))?,
                    witnesses,
                });
            }
            if doc.has(&format!("{p}.solve")) {
                s.solve = Some(read_solve(&doc, &format!("{p}.solve"))?);
            }
            let q = format!("{p}.uniqueness");
            if doc.has(&format!("{q}.starts")) {
                let n: usize = doc.num(&format!("{q}.starts"))?;
                s.uniqueness = Some(UniquenessReport {
                    results: (0..n)
                        .map(|j| read_solve(&doc, &format!("{q}.result.{j}")))
                        .collect::<Result<_, _>>()?,
                    max_pairwise_dnorm: doc.real(&format!("{q}.max_pairwise_dnorm"))?,
                    consistent: doc.boolean(&format!("{q}.consistent"))?,
                });
            }
            if doc.has(&format!("{p}.error")) {
                s.error = Some(doc.str(&format!("{p}.error"))?.to_string());
            }
            sections.push(s);
        }
        Ok(RunReport {
            version: doc.str("version")?.to_string(),
            command: doc.str("command")?.to_string(),
            instance: doc.str("instance")?.to_string(),
            seed: doc.num("seed")?,
            samples: doc.num("samples")?,
            max_iter: doc.num("max_iter")?,
            conv_tol: doc.real("conv_tol")?,
            sections,
            exit_code: doc.num("exit_code")?,
            wall_time_us: doc.num("wall_time_us")?,
        })
    }
}

pub fn strip_volatile(machine: &str) -> String {
    machine
        .lines()
        .filter(|l| {
            let key = l.split_once('=').map_or(*l, |(k, _)| k);
            !VOLATILE_KEYS.contains(&key)
        })
        .map(|l| format!("{l}\n"))
        .collect()
}

// ---------------------------------------------------------------------------
// parsing

struct Doc(HashMap<String, String>);

impl Doc {
    fn parse(text: &str) -> Result<Self, String> {
        let mut map = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("report line {}: expected key=value", n + 1))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(format!("report line {}: duplicate key `{k}`", n + 1));
            }
        }
        Ok(Self(map))
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn str(&self, key: &str) -> Result<&str, String> {
        self.0.get(key).map(String::as_str).ok_or_else(|| format!("missing report key `{key}`"))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<T, String> {
        let v = self.str(key)?;
        v.parse().map_err(|_| format!("bad value `{v}` for `{key}`"))
    }

    fn real(&self, key: &str) -> Result<f64, String> {
        parse_real(self.str(key)?).map_err(|e| format!("{e} for `{key}`"))
    }

    fn boolean(&self, key: &str) -> Result<bool, String> {
        self.num(key)
    }

    fn point(&self, key: &str) -> Result<Point, String> {
        let coords = self
            .str(key)?
            .split_whitespace()
            .map(parse_real)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{e} for `{key}`"))?;
        Point::new(coords).map_err(|e| format!("{e} for `{key}`"))
    }

    fn matrix(&self, key: &str) -> Result<AlgebraElement, String> {
        parse_inline(self.str(key)?).map_err(|e| format!("{e} for `{key}`"))
    }
}

fn read_solve(doc: &Doc, prefix: &str) -> Result<FixedPointResult, String> {
    Ok(FixedPointResult {
        point: doc.point(&format!("{prefix}.point"))?,
        iterations: doc.num(&format!("{prefix}.iterations"))?,
        residual_norm: doc.real(&format!("{prefix}.residual_norm"))?,
        apriori_bound: doc.real(&format!("{prefix}.apriori_bound"))?,
        aposteriori_bound: doc.real(&format!("{prefix}.aposteriori_bound"))?,
        converged: doc.boolean(&format!("{prefix}.converged"))?,
        norm_a: doc.real(&format!("{prefix}.norm_a"))?,
        d0_norm: doc.real(&format!("{prefix}.d0_norm"))?,
    })
}

fn read_axiom(doc: &Doc, prefix: &str, axiom: Axiom) -> Result<AxiomRecord, String> {
    let n_wit: usize = doc.num(&format!("{prefix}.witnesses"))?;
    let mut witnesses = Vec::with_capacity(n_wit);
    for i in 0..n_wit {
        let p = format!("{prefix}.witness.{i}");
        let n_pts: usize = doc.num(&format!("{p}.points"))?;
        let n_vals: usize = doc.num(&format!("{p}.values"))?;
        witnesses.push(AxiomWitness {
            axiom,
            points: (0..n_pts).map(|j| doc.point(&format!("{p}.point.{j}"))).collect::<Result<_, _>>()?,
            values: (0..n_vals).map(|j| doc.matrix(&format!("{p}.value.{j}"))).collect::<Result<_, _>>()?,
        });
    }
    Ok(AxiomRecord {
        checked: doc.num(&format!("{prefix}.checked"))?,
        failures: doc.num(&format!("{prefix}.failures"))?,
        witnesses,
    })
}
