//! Grid axes, evaluation tables and CSV output.

use std::io::{self, Write};

use psi_ham_core::{exact_solution, series_eval, FieldValue, HamSeries, ProblemSpec, SpatialPoint};

use crate::error::{CliError, CliResult};

/// One independent variable: a fixed value or an inclusive `lo:hi:count` range.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
    /// Ranges get a CSV column; fixed values do not.
    pub is_range: bool,
}

fn number(s: &str, what: &str) -> CliResult<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{what}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::usage(format!("{what}: '{s}' is not finite")));
    }
    Ok(v)
}

impl Axis {
    pub fn fixed(name: &'static str, v: f64) -> Self {
        Axis {
            name,
            values: vec![v],
            is_range: false,
        }
    }

    pub fn range(name: &'static str, lo: f64, hi: f64, count: usize) -> CliResult<Self> {
        if count < 2 || hi.partial_cmp(&lo) != Some(core::cmp::Ordering::Greater) || !(hi - lo).is_finite() {
            return Err(CliError::usage(format!(
                "--{name}: a range needs lo < hi and count >= 2"
            )));
        }
        let step = (hi - lo) / (count - 1) as f64;
        let values = (0..count)
            .map(|i| if i + 1 == count { hi } else { lo + i as f64 * step })
            .collect();
        Ok(Axis {
            name,
            values,
            is_range: true,
        })
    }

    /// `lo:hi:count` (endpoints included) or a single number.
    pub fn parse(name: &'static str, spec: &str) -> CliResult<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Axis::fixed(name, number(v, name)?)),
            [lo, hi, count] => {
                let count: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("--{name}: count '{count}' is not a positive integer")))?;
                Axis::range(name, number(lo, name)?, number(hi, name)?, count)
            }
            _ => Err(CliError::usage(format!(
                "--{name}: expected a number or lo:hi:count, got '{spec}'"
            ))),
        }
    }
}

pub fn parse_list(spec: &str, what: &str) -> CliResult<Vec<f64>> {
    let out = spec
        .split(',')
        .map(|s| number(s, what))
        .collect::<CliResult<Vec<_>>>()?;
    if out.is_empty() {
        return Err(CliError::usage(format!("{what}: empty list")));
    }
    Ok(out)
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped.
pub fn fmt_sig(v: f64) -> String {
    const DIGITS: usize = 12;
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= DIGITS as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Where the values come from.
#[derive(Clone, Debug)]
pub enum Source {
    /// Closed form; `terms` truncates the tube series.
    Exact { terms: usize },
    /// A stored series summed through `orders_used`.
    Series { series: HamSeries, orders_used: usize },
}

#[derive(Clone, Debug)]
pub struct EvalRequest {
    pub problem: ProblemSpec,
    /// Spatial axes (`r`, or `x` then `y`) followed by `t`.
    pub axes: Vec<Axis>,
    pub alphas: Vec<f64>,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// One line per failed cell.
    pub warnings: Vec<String>,
}

fn point_label(axes: &[Axis], idx: &[usize]) -> String {
    axes.iter()
        .zip(idx)
        .map(|(a, &i)| format!("{}={}", a.name, fmt_sig(a.values[i])))
        .collect::<Vec<_>>()
        .join(" ")
}

impl EvalRequest {
    fn check(&self) -> CliResult<()> {
        let names: Vec<&str> = self.axes.iter().map(|a| a.name).collect();
        let want: &[&str] = if self.problem.is_pair() {
            &["x", "y", "t"]
        } else {
            &["r", "t"]
        };
        if names != want {
            return Err(CliError::usage(format!(
                "{} needs the axes {}",
                self.problem.kind().name(),
                want.join(", ")
            )));
        }
        if self.alphas.is_empty() {
            return Err(CliError::usage("no alpha values requested"));
        }
        let t = self.axes.last().expect("t axis");
        if t.values.iter().any(|&v| v < self.problem.a()) {
            return Err(CliError::usage(format!(
                "--t: times must not precede a = {}",
                self.problem.a()
            )));
        }
        if let Source::Series { series, orders_used } = &self.source {
            if *orders_used > series.max_order() {
                return Err(CliError::usage(format!(
                    "--terms {orders_used} exceeds the stored series order {}",
                    series.max_order()
                )));
            }
            if self.alphas != [series.alpha().value()] {
                return Err(CliError::usage("a stored series fixes alpha; do not pass other values"));
            }
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = self
            .axes
            .iter()
            .filter(|a| a.is_range)
            .map(|a| a.name.to_string())
            .collect();
        for &al in &self.alphas {
            h.push(format!("u(alpha={})", fmt_sig(al)));
            if self.problem.is_pair() {
                h.push(format!("v(alpha={})", fmt_sig(al)));
            }
        }
        h
    }

    pub fn run(&self) -> CliResult<Table> {
        self.check()?;
        let problems = self
            .alphas
            .iter()
            .map(|&al| self.problem.with_alpha(al))
            .collect::<Result<Vec<_>, _>>()?;
        let dims: Vec<usize> = self.axes.iter().map(|a| a.values.len()).collect();
        let total: usize = dims.iter().product();
        let mut rows = Vec::with_capacity(total);
        let mut warnings = Vec::new();
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..total {
            let coords: Vec<f64> = self.axes.iter().zip(&idx).map(|(a, &i)| a.values[i]).collect();
            let t = *coords.last().expect("t axis");
            let point = if self.problem.is_pair() {
                SpatialPoint::Planar {
                    x: coords[0],
                    y: coords[1],
                }
            } else {
                SpatialPoint::Radial(coords[0])
            };
            let mut row: Vec<Option<f64>> = self
                .axes
                .iter()
                .zip(&coords)
                .filter(|(a, _)| a.is_range)
                .map(|(_, &c)| Some(c))
                .collect();
            for (p, &al) in problems.iter().zip(&self.alphas) {
                let value = match &self.source {
                    Source::Exact { terms } => exact_solution(p, point, t, *terms),
                    Source::Series { series, orders_used } => {
                        series_eval(series, p.psi(), p.a(), point, t, *orders_used)
                    }
                };
                match value {
                    Ok(FieldValue { u, v }) => {
                        row.push(Some(u));
                        if p.is_pair() {
                            row.push(v);
                        }
                    }
                    Err(e) => {
                        warnings.push(format!(
                            "warning: {} alpha={}: {e}; cell left empty",
                            point_label(&self.axes, &idx),
                            fmt_sig(al)
                        ));
                        row.push(None);
                        if p.is_pair() {
                            row.push(None);
                        }
                    }
                }
            }
            rows.push(row);
            // last axis varies fastest
            for d in (0..dims.len()).rev() {
                idx[d] += 1;
                if idx[d] < dims[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        Ok(Table {
            header: self.header(),
            rows,
            warnings,
        })
    }
}

impl Table {
    /// Comma-separated, `\n`-terminated; empty cells for missing values.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.map(fmt_sig).unwrap_or_default()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Column by header name.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}
