//! Plain-text model files.
//!
//! ```text
//! ergocast-model 1
//! sigma <σ>
//! lambda <λ>
//! n <training pairs>
//! coordinates <d>
//! coordinate <j>
//! loss <name>
//! rho <ρ>
//! center <c_j>
//! half_width <w_j>
//! objective <value>
//! solver <closed_form|descent|features:m> <iterations> <gradient norm> <jitter>
//! points <count> <input dim>
//! <x_1> … <x_d> <coefficient>
//! …
//! ```
//!
//! Every float is written with 17 significant digits, which round-trips
//! exactly.

use std::io::{BufRead, Write};

use super::{ForecastModel, OutputScaling};
use crate::losses::LossSpec;
use crate::rkhs::KernelExpansion;
use crate::svm::{SolverInfo, SolverMethod, SvmSolution};
use crate::{Error, Result, Series};

const MAGIC: &str = "ergocast-model 1";

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_model<W: Write>(model: &ForecastModel, mut w: W) -> Result<()> {
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "sigma {}", fmt(model.sigma))?;
    writeln!(w, "lambda {}", fmt(model.lambda))?;
    writeln!(w, "n {}", model.n)?;
    writeln!(w, "coordinates {}", model.coordinates.len())?;
    for (j, (sol, sc)) in model.coordinates.iter().zip(&model.scaling).enumerate() {
        writeln!(w, "coordinate {j}")?;
        writeln!(w, "loss {}", LossSpec::new(sol.loss.kind()))?;
        writeln!(w, "rho {}", fmt(sol.loss.rescale()))?;
        writeln!(w, "center {}", fmt(sc.center))?;
        writeln!(w, "half_width {}", fmt(sc.half_width))?;
        writeln!(w, "objective {}", fmt(sol.objective))?;
        let method = match sol.info.method {
            SolverMethod::ClosedForm => "closed_form".to_string(),
            SolverMethod::Descent => "descent".to_string(),
            SolverMethod::Features { truncation } => format!("features:{truncation}"),
        };
        writeln!(
            w,
            "solver {method} {} {} {}",
            sol.info.iterations,
            fmt(sol.info.gradient_norm),
            fmt(sol.info.jitter)
        )?;
        let e = &sol.expansion;
        writeln!(w, "points {} {}", e.len(), e.dim())?;
        for (p, c) in e.points().rows().zip(e.coeffs()) {
            let mut line: Vec<String> = p.iter().map(|v| fmt(*v)).collect();
            line.push(fmt(*c));
            writeln!(w, "{}", line.join(" "))?;
        }
    }
    Ok(())
}

struct Lines<R> {
    inner: R,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next(&mut self) -> Result<String> {
        let mut s = String::new();
        loop {
            s.clear();
            self.line += 1;
            if self.inner.read_line(&mut s)? == 0 {
                return Err(Error::Parse(format!("model file ends early at line {}", self.line)));
            }
            let t = s.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok(t.to_string());
            }
        }
    }

    fn field(&mut self, key: &str) -> Result<Vec<String>> {
        let l = self.next()?;
        let mut it = l.split_whitespace();
        match it.next() {
            Some(k) if k == key => Ok(it.map(str::to_string).collect()),
            _ => Err(Error::Parse(format!("line {}: expected `{key}`, got `{l}`", self.line))),
        }
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| Error::Parse(format!("line {}: bad number `{s}`", self.line)))
    }

    fn one<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let v = self.field(key)?;
        match v.as_slice() {
            [x] => self.num(x),
            _ => Err(Error::Parse(format!("line {}: `{key}` takes one value", self.line))),
        }
    }
}

pub fn read_model<R: BufRead>(r: R) -> Result<ForecastModel> {
    let mut l = Lines { inner: r, line: 0 };
    if l.next()? != MAGIC {
        return Err(Error::Parse("not an ergocast model file".into()));
    }
    let sigma: f64 = l.one("sigma")?;
    let lambda: f64 = l.one("lambda")?;
    let n: usize = l.one("n")?;
    let d: usize = l.one("coordinates")?;
    let mut coordinates = Vec::with_capacity(d);
    let mut scaling = Vec::with_capacity(d);
    for j in 0..d {
        let idx: usize = l.one("coordinate")?;
        if idx != j {
            return Err(Error::Parse(format!("line {}: expected coordinate {j}", l.line)));
        }
        let name = l.field("loss")?.join(" ");
        let rho: f64 = l.one("rho")?;
        let loss = name.parse::<LossSpec>()?.with_rescale(rho);
        let center: f64 = l.one("center")?;
        let half_width: f64 = l.one("half_width")?;
        let objective: f64 = l.one("objective")?;
        let s = l.field("solver")?;
        if s.len() != 4 {
            return Err(Error::Parse(format!("line {}: malformed solver line", l.line)));
        }
        let method = match s[0].as_str() {
            "closed_form" => SolverMethod::ClosedForm,
            "descent" => SolverMethod::Descent,
            other => match other.strip_prefix("features:") {
                Some(m) => SolverMethod::Features { truncation: l.num(m)? },
                None => return Err(Error::Parse(format!("line {}: unknown solver `{other}`", l.line))),
            },
        };
        let info = SolverInfo {
            method,
            iterations: l.num(&s[1])?,
            gradient_norm: l.num(&s[2])?,
            jitter: l.num(&s[3])?,
        };
        let p = l.field("points")?;
        if p.len() != 2 {
            return Err(Error::Parse(format!("line {}: `points` takes a count and a dimension", l.line)));
        }
        let count: usize = l.num(&p[0])?;
        let dim: usize = l.num(&p[1])?;
        let mut pts = Series::with_capacity(dim, count);
        let mut coeffs = Vec::with_capacity(count);
        let mut row = vec![0.0; dim];
        for _ in 0..count {
            let line = l.next()?;
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != dim + 1 {
                return Err(Error::Parse(format!("line {}: expected {} values", l.line, dim + 1)));
            }
            for k in 0..dim {
                row[k] = l.num(vals[k])?;
            }
            pts.push(&row);
            coeffs.push(l.num(vals[dim])?);
        }
        coordinates.push(SvmSolution {
            expansion: KernelExpansion::new(sigma, pts, coeffs)?,
            objective,
            lambda,
            loss,
            info,
        });
        scaling.push(OutputScaling { center, half_width });
    }
    Ok(ForecastModel {
        coordinates,
        scaling,
        lambda,
        sigma,
        n,
    })
}
