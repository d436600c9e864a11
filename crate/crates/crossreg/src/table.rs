//! The normal-form table: eight generic singularities on Σ = {x = 0}, their
//! regularization in the ε-directional chart, after division by the divisor.

use serde::Serialize;

use conv_reg::{convolve_symbolic, Mollifier};
use pws_core::{default_vars, MultiPoly, PiecewiseField};

use crate::error::CrossError;

pub struct TableRow {
    pub name: &'static str,
    pub plus: [&'static str; 2],
    pub minus: [&'static str; 2],
    /// Reference 𝒳 in the chart variables (x, y, eps).
    pub expected: [&'static str; 2],
}

pub const ROWS: [TableRow; 8] = [
    TableRow { name: "escaping", plus: ["1", "1"], minus: ["-1", "1"], expected: ["x", "eps"] },
    TableRow { name: "sliding", plus: ["-1", "-1"], minus: ["1", "-1"], expected: ["-x", "-eps"] },
    TableRow { name: "saddle", plus: ["x + 1", "-y"], minus: ["x - 1", "-y"], expected: ["x + eps*x", "-eps*y"] },
    TableRow { name: "fold-regular", plus: ["y", "1"], minus: ["1", "1"], expected: ["(1 - x + y*(1 + x))/2", "eps"] },
    TableRow {
        name: "saddle-node",
        plus: ["-1", "-y^2"],
        minus: ["1", "0"],
        expected: ["-x", "-eps*(1 + x)*(eps^2/6 + y^2/2)"],
    },
    TableRow { name: "elliptic-fold", plus: ["-y", "1"], minus: ["y", "1"], expected: ["-x*y", "eps"] },
    TableRow { name: "hyperbolic-fold", plus: ["y", "1"], minus: ["2*y", "-1"], expected: ["(y - 3*x*y)/2", "eps*x"] },
    TableRow { name: "parabolic-fold", plus: ["-y", "-1"], minus: ["2*y", "1"], expected: ["(y - 3*x*y)/2", "-eps*x"] },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowReport {
    pub name: String,
    pub x_plus: [String; 2],
    pub x_minus: [String; 2],
    pub expected: [String; 2],
    pub computed: [String; 2],
    /// computed − expected, per component.
    pub residual: [String; 2],
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReport {
    pub chart: String,
    pub mollifier: String,
    pub rows: Vec<RowReport>,
}

impl TableReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,pass,computed_x,computed_y,residual_x,residual_y\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},\"{}\",\"{}\",\"{}\",\"{}\"\n",
                r.name, r.pass, r.computed[0], r.computed[1], r.residual[0], r.residual[1]
            ));
        }
        s
    }
}

pub fn row_field(row: &TableRow) -> Result<PiecewiseField, CrossError> {
    Ok(PiecewiseField::parse(2, &default_vars(2), &[0], &[&row.plus, &row.minus])?)
}

pub fn run_row(row: &TableRow) -> Result<RowReport, CrossError> {
    let core = convolve_symbolic(&row_field(row)?, &[0], &Mollifier::box_profile())?;
    let mut computed = [String::new(), String::new()];
    let mut expected = [String::new(), String::new()];
    let mut residual = [String::new(), String::new()];
    let mut pass = true;
    for k in 0..2 {
        let want = MultiPoly::parse(row.expected[k], &core.vars)?;
        let diff = &core.components[k] - &want;
        pass &= diff.is_zero();
        computed[k] = core.components[k].to_string();
        expected[k] = want.to_string();
        residual[k] = diff.to_string();
    }
    Ok(RowReport {
        name: row.name.to_string(),
        x_plus: row.plus.map(String::from),
        x_minus: row.minus.map(String::from),
        expected,
        computed,
        residual,
        pass,
    })
}

pub fn run_table() -> Result<TableReport, CrossError> {
    Ok(TableReport {
        chart: "eps: x = eps*y1, divided by eps".into(),
        mollifier: "box".into(),
        rows: ROWS.iter().map(run_row).collect::<Result<_, _>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping_and_saddle_node_rows() {
        assert!(run_row(&ROWS[0]).unwrap().pass);
        assert!(run_row(&ROWS[4]).unwrap().pass);
    }

    #[test]
    fn hyperbolic_fold_residual() {
        let r = run_row(&ROWS[6]).unwrap();
        assert!(!r.pass);
        let v = pws_core::var_list(&["x", "y", "eps"]);
        assert_eq!(MultiPoly::parse(&r.residual[0], &v).unwrap(), MultiPoly::parse("y + x*y", &v).unwrap());
        assert_eq!(r.residual[1], "0");
    }
}
