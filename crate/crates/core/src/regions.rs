//! Efficiency regions in the normalized plane `alpha = 1`,
//! `(beta, rho) in ]0, +inf[ x ]0, 1[`.
//!
//! [`classify`] applies the closed-form region description; [`best_by_enumeration`]
//! evaluates the five optimal rates and takes the argmin. The two are kept
//! independent so each can check the other.

use std::fmt::{self, Write as _};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    beta: f64,
    rho: f64,
}

impl RegionPoint {
    pub fn new(beta: f64, rho: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must lie in ]0, +inf[, got {beta}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain(format!("rho must lie in ]0, 1[, got {rho}")));
        }
        Ok(RegionPoint { beta, rho })
    }

    /// Normalizes general `(alpha, beta, rho)` to `(beta / alpha, rho alpha)`.
    pub fn normalized(alpha: f64, beta: f64, rho: f64) -> Result<Self> {
        RegionPoint::new(beta / alpha, rho * alpha)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Winner {
    #[serde(rename = "FBS_proxF")]
    FbsProxF,
    #[serde(rename = "DRS")]
    Drs,
    #[serde(rename = "PRS")]
    Prs,
}

impl Winner {
    pub fn name(self) -> &'static str {
        match self {
            Winner::FbsProxF => "FBS_proxF",
            Winner::Drs => "DRS",
            Winner::Prs => "PRS",
        }
    }

    pub fn algorithm(self) -> Algorithm {
        match self {
            Winner::FbsProxF => Algorithm::FbsGradGProxF,
            Winner::Drs => Algorithm::Drs,
            Winner::Prs => Algorithm::Prs,
        }
    }

    fn color(self) -> &'static str {
        match self {
            Winner::FbsProxF => "#e377c2",
            Winner::Drs => "#ff7f0e",
            Winner::Prs => "#8c564b",
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionId {
    Omega1,
    Omega2,
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub winner: Winner,
    pub region: RegionId,
}

/// `eta(beta) = (1 - sqrt(1 - 4/beta)) / (1 + sqrt(1 - 4/beta))`, defined for
/// `beta >= 4`.
pub fn eta(beta: f64) -> Result<f64> {
    if !(beta >= 4.0) {
        return Err(Error::Domain(format!("eta requires beta >= 4, got {beta}")));
    }
    let s = (1.0 - 4.0 / beta).max(0.0).sqrt();
    Ok((1.0 - s) / (1.0 + s))
}

/// Optimal optimization-setting rates at a normalized point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalRates {
    /// EA.
    pub r_g: f64,
    /// FBS, gradient on `f`, prox on `g`.
    pub r_t1: f64,
    /// FBS, prox on `f`, gradient on `g`.
    pub r_t2: f64,
    pub r_r: f64,
    pub r_s: f64,
}

impl OptimalRates {
    pub fn at(point: &RegionPoint) -> Self {
        let (b, r) = (point.beta, point.rho);
        let ib = 1.0 / b;
        let sr = r.sqrt();
        OptimalRates {
            r_g: (1.0 + ib - r) / (1.0 + ib + r),
            r_t1: (1.0 - r) / (1.0 + r),
            r_t2: 1.0 / (1.0 + 2.0 * b * r),
            r_r: (1.0 - sr) / (1.0 + sr),
            r_s: if b <= 4.0 {
                1.0 / (1.0 + sr)
            } else {
                2.0 / (2.0 + (b * r).sqrt())
            },
        }
    }

    pub fn entries(&self) -> [(Algorithm, f64); 5] {
        [
            (Algorithm::Ea, self.r_g),
            (Algorithm::FbsGradFProxG, self.r_t1),
            (Algorithm::FbsGradGProxF, self.r_t2),
            (Algorithm::Prs, self.r_r),
            (Algorithm::Drs, self.r_s),
        ]
    }
}

/// Argmin over the five optimal rates. Ties keep the earlier entry of
/// [`OptimalRates::entries`].
pub fn best_by_enumeration(point: &RegionPoint) -> (Algorithm, OptimalRates) {
    let rates = OptimalRates::at(point);
    let mut best = rates.entries()[0];
    for entry in rates.entries().into_iter().skip(1) {
        if entry.1 < best.1 {
            best = entry;
        }
    }
    (best.0, rates)
}

pub fn in_omega1(point: &RegionPoint) -> bool {
    let (b, r) = (point.beta, point.rho);
    if !(b > 4.0) {
        return false;
    }
    let e = eta(b).expect("beta > 4");
    let lower = (1.0f64 / 16.0).max(e) / b;
    let upper = 1.0 / (b * e);
    lower <= r && r <= upper
}

pub fn in_omega2(point: &RegionPoint) -> bool {
    let (b, r) = (point.beta, point.rho);
    if !(b > 16.0) {
        return false;
    }
    let chi = (1.0 / (16.0 * b)).min(1.0 - 8.0 * (b.sqrt() - 2.0) / b);
    r < chi
}

pub fn classify(point: &RegionPoint) -> RegionLabel {
    if in_omega2(point) {
        RegionLabel {
            winner: Winner::Drs,
            region: RegionId::Omega2,
        }
    } else if in_omega1(point) {
        RegionLabel {
            winner: Winner::FbsProxF,
            region: RegionId::Omega1,
        }
    } else {
        RegionLabel {
            winner: Winner::Prs,
            region: RegionId::Complement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionCell {
    pub point: RegionPoint,
    pub label: RegionLabel,
    pub rates: OptimalRates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub betas: Vec<f64>,
    pub rhos: Vec<f64>,
    /// Row-major by `rho`: `cells[i][j]` is `(betas[j], rhos[i])`.
    pub cells: Vec<Vec<RegionCell>>,
}

pub fn region_map(beta_grid: &[f64], rho_grid: &[f64]) -> Result<RegionMap> {
    let cells = rho_grid
        .par_iter()
        .map(|&rho| {
            beta_grid
                .iter()
                .map(|&beta| {
                    let point = RegionPoint::new(beta, rho)?;
                    Ok(RegionCell {
                        point,
                        label: classify(&point),
                        rates: OptimalRates::at(&point),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionMap {
        betas: beta_grid.to_vec(),
        rhos: rho_grid.to_vec(),
        cells,
    })
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

impl RegionMap {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "beta,rho,winner,r_T2_star,r_S_star,r_R_star")?;
        for row in &self.cells {
            for cell in row {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    cell.point.beta,
                    cell.point.rho,
                    cell.label.winner,
                    cell.rates.r_t2,
                    cell.rates.r_s,
                    cell.rates.r_r
                )?;
            }
        }
        Ok(())
    }

    /// Heat map, `beta` on a log axis and `rho` on a linear axis.
    pub fn to_svg(&self) -> String {
        let (w, h) = (640.0, 480.0);
        let (left, top, plot_w, plot_h) = (70.0, 20.0, 440.0, 400.0);
        let nb = self.betas.len().max(1) as f64;
        let nr = self.rhos.len().max(1) as f64;
        let (cw, ch) = (plot_w / nb, plot_h / nr);
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(svg, r#"<g class="cells">"#);
        for (i, row) in self.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                // rho grows upwards
                let x = left + j as f64 * cw;
                let y = top + plot_h - (i as f64 + 1.0) * ch;
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                    cw + 0.05,
                    ch + 0.05,
                    cell.label.winner.color()
                );
            }
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        if let (Some(b0), Some(b1)) = (self.betas.first(), self.betas.last()) {
            let _ = writeln!(
                svg,
                r#"<text x="{left}" y="{}" font-size="12">beta = {b0:.3e}</text>"#,
                top + plot_h + 18.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12" text-anchor="end">beta = {b1:.3e} (log scale)</text>"#,
                left + plot_w,
                top + plot_h + 18.0
            );
        }
        if let (Some(r0), Some(r1)) = (self.rhos.first(), self.rhos.last()) {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{r0:.3}</text>"#,
                left - 4.0,
                top + plot_h
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12" text-anchor="end">rho = {r1:.3}</text>"#,
                left - 4.0,
                top + 12.0
            );
        }
        let _ = writeln!(svg, r#"<g class="legend">"#);
        for (k, winner) in [Winner::Prs, Winner::Drs, Winner::FbsProxF].iter().enumerate() {
            let y = top + 10.0 + 24.0 * k as f64;
            let _ = writeln!(
                svg,
                r#"<rect x="530" y="{y}" width="16" height="16" fill="{}"/><text x="552" y="{}" font-size="13">{}</text>"#,
                winner.color(),
                y + 13.0,
                winner
            );
        }
        let _ = writeln!(svg, "</g>\n</svg>");
        svg
    }
}
