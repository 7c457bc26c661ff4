//! Dimension witnesses and the retrocausality bound.

use crate::error::AnalyticsError;

/// `p(x, y)` for four preparations and two measurements; `p[x][y]` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessTable2 {
    pub p: [[f64; 2]; 4],
}

impl WitnessTable2 {
    /// Build from 1-based `(x, y, p)` entries; every cell must be present.
    pub fn from_entries(entries: &[(usize, usize, f64)]) -> Result<Self, AnalyticsError> {
        let mut p = [[f64::NAN; 2]; 4];
        for &(x, y, v) in entries {
            if (1..=4).contains(&x) && (1..=2).contains(&y) {
                p[x - 1][y - 1] = v;
            }
        }
        for (x, row) in p.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                if v.is_nan() {
                    return Err(AnalyticsError::MissingEntry(format!("p({}, {})", x + 1, y + 1)));
                }
            }
        }
        Ok(Self { p })
    }
}

/// Correlator tables for `I_DW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BTable {
    /// `<B>_xy` for three preparations and two measurements, `b[x][y]` 0-based.
    PrepareMeasure([[f64; 2]; 3]),
    /// `B_jxy` for heralds `j = 3` and `j = 4` over two preparations and
    /// two measurements, `b3[x][y]` and `b4[x][y]` 0-based.
    Herald { b3: [[f64; 2]; 2], b4: [[f64; 2]; 2] },
}

/// `|det W2|` with rows `p(1,y) - p(2,y)` and `p(3,y) - p(4,y)` per measurement.
pub fn witness_w2(t: &WitnessTable2) -> f64 {
    let p = &t.p;
    let w11 = p[0][0] - p[1][0];
    let w12 = p[2][0] - p[3][0];
    let w21 = p[0][1] - p[1][1];
    let w22 = p[2][1] - p[3][1];
    (w11 * w22 - w12 * w21).abs()
}

/// `I_DW` for either table layout.
pub fn witness_idw(b: &BTable) -> f64 {
    match b {
        BTable::PrepareMeasure(b) => (b[0][0] + b[0][1] + b[1][0] - b[1][1] - b[2][0]).abs(),
        BTable::Herald { b3, b4 } => (b3[0][0] + b3[0][1] + b3[1][0] - b3[1][1] - b4[0][0]).abs(),
    }
}

/// `max((I_DW - 3) / 4, 0)`.
pub fn r_min(idw: f64) -> f64 {
    ((idw - 3.0) / 4.0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ideal_single_photon_w2() {
        let t = WitnessTable2::from_entries(&[
            (1, 1, 1.0),
            (2, 1, 0.0),
            (3, 1, 0.5),
            (4, 1, 0.5),
            (1, 2, 0.5),
            (2, 2, 0.5),
            (3, 2, 1.0),
            (4, 2, 0.0),
        ])
        .unwrap();
        assert_eq!(witness_w2(&t), 1.0);
        assert_eq!(witness_w2(&WitnessTable2 { p: [[0.3; 2]; 4] }), 0.0);
    }

    #[test]
    fn missing_entry_is_reported() {
        let err = WitnessTable2::from_entries(&[(1, 1, 1.0)]).unwrap_err();
        assert_eq!(err, AnalyticsError::MissingEntry("p(1, 2)".into()));
    }

    #[test]
    fn idw_extremes() {
        assert_eq!(witness_idw(&BTable::PrepareMeasure([[0.0; 2]; 3])), 0.0);
        let b = [[1.0, 1.0], [1.0, -1.0], [-1.0, 0.3]];
        assert_eq!(witness_idw(&BTable::PrepareMeasure(b)), 5.0);
        let h = BTable::Herald {
            b3: [[1.0, 1.0], [1.0, -1.0]],
            b4: [[-1.0, 0.2], [0.0, 0.0]],
        };
        assert_eq!(witness_idw(&h), 5.0);
    }

    #[test]
    fn r_min_values() {
        assert_eq!(r_min(3.0), 0.0);
        assert!((r_min(1.0 + 2.0 * 2f64.sqrt()) - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
        assert_eq!(r_min(5.0), 0.5);
        assert_eq!(r_min(1.0), 0.0);
    }

    proptest! {
        #[test]
        fn bounded_for_valid_tables(v in prop::array::uniform6(-1.0f64..=1.0)) {
            let b = BTable::PrepareMeasure([[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]]);
            let i = witness_idw(&b);
            prop_assert!(i <= 5.0 + 1e-12);
            let r = r_min(i);
            prop_assert!((0.0..=0.5 + 1e-12).contains(&r));
        }
    }
}
