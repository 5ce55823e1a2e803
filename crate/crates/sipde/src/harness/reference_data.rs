//! Published convergence-table values, transcribed for side-by-side
//! comparison in sweeps and the acceptance suite. Errors are relative
//! (normalized by the same norm of the exact solution at the final
//! time); orders are as printed, NaN where the coarsest row has none.

/// One table row: `(n, l2, order, l1, order, linf, order)`.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    pub n: usize,
    pub l2: f64,
    pub o_l2: f64,
    pub l1: f64,
    pub o_l1: f64,
    pub linf: f64,
    pub o_linf: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ReferenceTable {
    pub table: TableId,
    pub scheme: &'static str,
    pub rows: &'static [ReferenceRow],
}

/// The eight published tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableId {
    R1,
    R2,
    R2B,
    R3,
    M1,
    M2,
    M3,
    M4,
}

impl TableId {
    pub const ALL: [TableId; 8] = [
        TableId::R1,
        TableId::R2,
        TableId::R2B,
        TableId::R3,
        TableId::M1,
        TableId::M2,
        TableId::M3,
        TableId::M4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TableId::R1 => "R1",
            TableId::R2 => "R2",
            TableId::R2B => "R2B",
            TableId::R3 => "R3",
            TableId::M1 => "M1",
            TableId::M2 => "M2",
            TableId::M3 => "M3",
            TableId::M4 => "M4",
        }
    }

    pub fn parse(s: &str) -> Option<TableId> {
        let up = s.to_ascii_uppercase();
        TableId::ALL.iter().copied().find(|t| t.name() == up)
    }
}

const fn row(n: usize, l2: f64, o_l2: f64, l1: f64, o_l1: f64, linf: f64, o_linf: f64) -> ReferenceRow {
    ReferenceRow {
        n,
        l2,
        o_l2,
        l1,
        o_l1,
        linf,
        o_linf,
    }
}

#[rustfmt::skip]
const R1_0: [ReferenceRow; 5] = [
    row(40, 5.7907e-4, f64::NAN, 5.4529e-4, f64::NAN, 9.1249e-4, f64::NAN),
    row(80, 8.8345e-5, 2.71, 8.8124e-5, 2.63, 1.1886e-4, 2.94),
    row(160, 1.2787e-5, 2.78, 1.2933e-5, 2.76, 1.4922e-5, 3.00),
    row(320, 1.8538e-6, 2.79, 1.8808e-6, 2.78, 2.0453e-6, 2.87),
    row(640, 2.4342e-7, 2.93, 2.4629e-7, 2.93, 2.6306e-7, 2.96),
];

#[rustfmt::skip]
const R1_1: [ReferenceRow; 5] = [
    row(40, 3.8819e-3, f64::NAN, 3.6931e-3, f64::NAN, 5.2543e-3, f64::NAN),
    row(80, 7.9215e-4, 2.30, 7.6735e-4, 2.26, 1.0492e-3, 2.32),
    row(160, 1.4133e-4, 2.49, 1.3994e-4, 2.46, 1.7398e-4, 2.60),
    row(320, 2.4209e-5, 2.55, 2.4271e-5, 2.53, 2.8472e-5, 2.61),
    row(640, 3.7624e-6, 2.68, 3.7299e-6, 2.70, 4.4558e-6, 2.67),
];

#[rustfmt::skip]
const R1_2: [ReferenceRow; 5] = [
    row(40, 6.1483e-4, f64::NAN, 5.7829e-4, f64::NAN, 9.7074e-4, f64::NAN),
    row(80, 9.6939e-5, 2.66, 9.7006e-5, 2.58, 1.2706e-4, 2.93),
    row(160, 1.4473e-5, 2.74, 1.4714e-5, 2.72, 1.6298e-5, 2.96),
    row(320, 2.163e-6, 2.74, 2.1909e-6, 2.75, 2.4405e-6, 2.74),
    row(640, 2.8932e-7, 2.90, 2.9151e-7, 2.90, 3.2393e-7, 2.91),
];

#[rustfmt::skip]
const R2_0: [ReferenceRow; 4] = [
    row(80, 8.3717e-4, f64::NAN, 7.4284e-4, f64::NAN, 1.3899e-3, f64::NAN),
    row(160, 1.0634e-4, 2.97, 9.289e-5, 3.00, 2.6686e-4, 2.38),
    row(320, 1.3408e-5, 2.98, 1.1537e-5, 3.00, 4.4896e-5, 2.57),
    row(640, 1.6915e-6, 2.98, 1.4397e-6, 3.00, 7.3241e-6, 2.62),
];

#[rustfmt::skip]
const R2_1: [ReferenceRow; 4] = [
    row(80, 8.4776e-4, f64::NAN, 7.4989e-4, f64::NAN, 1.4355e-3, f64::NAN),
    row(160, 1.0768e-4, 2.97, 9.3767e-5, 3.00, 2.7374e-4, 2.39),
    row(320, 1.3578e-5, 2.98, 1.1653e-5, 3.00, 4.5897e-5, 2.58),
    row(640, 1.7128e-6, 2.98, 1.4538e-6, 3.00, 7.4797e-6, 2.62),
];

#[rustfmt::skip]
const R2_2: [ReferenceRow; 4] = [
    row(80, 8.3718e-4, f64::NAN, 7.4284e-4, f64::NAN, 1.3900e-3, f64::NAN),
    row(160, 1.0634e-4, 2.98, 9.289e-5, 3.00, 2.6686e-4, 2.38),
    row(320, 1.3408e-5, 2.99, 1.1537e-5, 3.00, 4.4896e-5, 2.57),
    row(640, 1.6915e-6, 2.99, 1.4397e-6, 3.00, 7.3242e-6, 2.62),
];

#[rustfmt::skip]
const R2B_0: [ReferenceRow; 4] = [
    row(80, 2.9585e-3, f64::NAN, 2.7744e-3, f64::NAN, 4.4434e-3, f64::NAN),
    row(160, 4.0981e-4, 2.85, 3.240e-4, 3.09, 7.5084e-4, 2.56),
    row(320, 5.7821e-5, 2.82, 4.0098e-5, 3.01, 1.7626e-4, 2.09),
    row(640, 7.3668e-6, 2.97, 4.9762e-6, 3.01, 2.3916e-5, 2.88),
];

#[rustfmt::skip]
const R2B_1: [ReferenceRow; 4] = [
    row(80, 3.0304e-3, f64::NAN, 2.8452e-3, f64::NAN, 4.5423e-3, f64::NAN),
    row(160, 4.1974e-4, 2.85, 3.3414e-4, 3.09, 7.6124e-4, 2.57),
    row(320, 5.9084e-5, 2.82, 4.1481e-5, 3.00, 1.7839e-4, 2.09),
    row(640, 7.5253e-6, 2.97, 5.1517e-6, 3.00, 2.4096e-5, 2.89),
];

#[rustfmt::skip]
const R2B_2: [ReferenceRow; 4] = [
    row(80, 2.9584e-3, f64::NAN, 2.7743e-3, f64::NAN, 4.4433e-3, f64::NAN),
    row(160, 4.0980e-4, 2.85, 3.2398e-4, 3.09, 7.5081e-4, 2.56),
    row(320, 5.7820e-5, 2.83, 4.0096e-5, 3.01, 1.7626e-4, 2.09),
    row(640, 7.3666e-6, 2.97, 4.9760e-6, 3.01, 2.3916e-5, 2.88),
];

#[rustfmt::skip]
const R3_0: [ReferenceRow; 5] = [
    row(40, 2.4253e-3, f64::NAN, 2.3884e-3, f64::NAN, 2.7038e-3, f64::NAN),
    row(80, 3.1623e-4, 2.94, 3.1654e-4, 2.91, 3.3670e-4, 3.00),
    row(160, 4.1681e-5, 2.92, 4.1714e-5, 2.92, 4.3549e-5, 2.95),
    row(320, 5.3676e-6, 2.96, 5.3466e-6, 2.96, 5.7551e-6, 2.92),
    row(640, 6.8320e-7, 2.97, 6.7657e-7, 2.98, 7.6768e-7, 2.91),
];

#[rustfmt::skip]
const R3_1: [ReferenceRow; 5] = [
    row(40, 2.1189e-2, f64::NAN, 1.8986e-2, f64::NAN, 2.8878e-2, f64::NAN),
    row(80, 3.3998e-3, 2.63, 3.0674e-3, 2.62, 5.1576e-3, 2.47),
    row(160, 4.6211e-4, 2.87, 4.2009e-4, 2.86, 6.8619e-4, 2.91),
    row(320, 5.6802e-5, 3.02, 5.3937e-5, 2.96, 8.0083e-5, 3.09),
    row(640, 7.1809e-6, 2.98, 7.046e-6, 2.94, 9.0132e-6, 3.15),
];

#[rustfmt::skip]
const R3_2: [ReferenceRow; 5] = [
    row(40, 2.2745e-3, f64::NAN, 2.2475e-3, f64::NAN, 2.5267e-3, f64::NAN),
    row(80, 3.082e-4, 2.88, 3.0777e-4, 2.86, 3.3221e-4, 2.92),
    row(160, 4.1406e-5, 2.89, 4.1176e-5, 2.90, 4.3276e-5, 2.94),
    row(320, 5.3855e-6, 2.94, 5.3251e-6, 2.95, 5.9901e-6, 2.85),
    row(640, 6.8859e-7, 2.97, 6.7672e-7, 2.98, 7.9635e-7, 2.91),
];

#[rustfmt::skip]
const M1_0: [ReferenceRow; 4] = [
    row(40, 4.9945e-3, f64::NAN, 4.8052e-3, f64::NAN, 5.6425e-3, f64::NAN),
    row(80, 1.2655e-3, 1.98, 1.2155e-3, 1.98, 1.4290e-3, 1.98),
    row(160, 3.2178e-4, 1.98, 3.0859e-4, 1.98, 3.6369e-4, 1.97),
    row(320, 8.1720e-5, 1.98, 7.8267e-5, 1.98, 9.2704e-5, 1.97),
];

#[rustfmt::skip]
const M1_1: [ReferenceRow; 4] = [
    row(40, 5.1979e-4, f64::NAN, 5.3682e-4, f64::NAN, 4.7807e-4, f64::NAN),
    row(80, 6.3538e-5, 3.03, 6.4531e-5, 3.06, 6.2774e-5, 2.93),
    row(160, 7.9072e-6, 3.01, 7.9777e-6, 3.02, 8.1238e-6, 2.95),
    row(320, 9.8617e-7, 3.00, 9.9384e-7, 3.00, 1.0236e-6, 2.99),
];

#[rustfmt::skip]
const M1_2: [ReferenceRow; 4] = [
    row(40, 1.0994e-4, f64::NAN, 1.0398e-4, f64::NAN, 1.2210e-4, f64::NAN),
    row(80, 6.9958e-6, 3.97, 6.5808e-6, 3.98, 7.8412e-6, 3.96),
    row(160, 4.3934e-7, 3.99, 4.1397e-7, 3.99, 5.0557e-7, 3.96),
    row(320, 2.7497e-8, 4.00, 2.5921e-8, 4.00, 3.1928e-8, 3.99),
];

#[rustfmt::skip]
const M2_0: [ReferenceRow; 4] = [
    row(40, 4.7704e-2, f64::NAN, 4.7454e-2, f64::NAN, 5.2723e-2, f64::NAN),
    row(80, 1.3009e-2, 1.87, 1.2740e-2, 1.90, 1.5084e-2, 1.81),
    row(160, 3.3349e-3, 1.96, 3.2462e-3, 1.97, 3.9278e-3, 1.94),
    row(320, 8.4052e-4, 1.99, 8.1573e-4, 1.99, 9.9778e-4, 1.98),
];

#[rustfmt::skip]
const M2_1: [ReferenceRow; 4] = [
    row(40, 2.2582e-2, f64::NAN, 2.2040e-2, f64::NAN, 2.6428e-2, f64::NAN),
    row(80, 2.7192e-3, 3.05, 2.6847e-3, 3.04, 3.1086e-3, 3.09),
    row(160, 3.3292e-4, 3.03, 3.2998e-4, 3.02, 3.8601e-4, 3.01),
    row(320, 4.1807e-5, 2.99, 4.1239e-5, 3.00, 5.0343e-5, 2.94),
];

#[rustfmt::skip]
const M2_2: [ReferenceRow; 4] = [
    row(40, 1.0584e-2, f64::NAN, 1.0858e-2, f64::NAN, 1.0397e-2, f64::NAN),
    row(80, 7.2030e-4, 3.88, 7.1663e-4, 3.92, 7.9986e-4, 3.70),
    row(160, 4.6143e-5, 3.96, 4.5104e-5, 3.99, 5.2604e-5, 3.93),
    row(320, 2.8343e-6, 4.03, 2.7773e-6, 4.02, 3.1524e-6, 4.06),
];

#[rustfmt::skip]
const M3_0: [ReferenceRow; 4] = [
    row(40, 6.1589e-3, f64::NAN, 5.5845e-3, f64::NAN, 1.2083e-2, f64::NAN),
    row(80, 8.3338e-4, 2.89, 7.3968e-4, 2.92, 1.3829e-3, 3.13),
    row(160, 1.0540e-4, 2.98, 9.1965e-5, 3.01, 2.6687e-4, 2.37),
    row(320, 1.3140e-5, 3.00, 1.1300e-5, 3.02, 4.4219e-5, 2.59),
];

#[rustfmt::skip]
const M3_1: [ReferenceRow; 4] = [
    row(40, 6.1748e-3, f64::NAN, 5.5947e-3, f64::NAN, 1.2194e-2, f64::NAN),
    row(80, 8.3732e-4, 2.88, 7.4289e-4, 2.91, 1.3927e-3, 3.13),
    row(160, 1.0633e-4, 2.98, 9.2869e-5, 3.00, 2.6703e-4, 2.38),
    row(320, 1.3406e-5, 2.99, 1.1534e-5, 3.01, 4.4895e-5, 2.57),
];

#[rustfmt::skip]
const M3_2: [ReferenceRow; 4] = [
    row(40, 5.3594e-4, f64::NAN, 4.2829e-4, f64::NAN, 1.2219e-3, f64::NAN),
    row(80, 3.2804e-5, 4.03, 2.5719e-5, 4.06, 1.0037e-4, 3.61),
    row(160, 2.0451e-6, 4.00, 1.6402e-6, 3.97, 6.9656e-6, 3.85),
    row(320, 1.3039e-7, 3.97, 1.0193e-7, 4.01, 5.0042e-7, 3.80),
];

#[rustfmt::skip]
const M4_0: [ReferenceRow; 4] = [
    row(40, 4.1028e-3, f64::NAN, 4.1125e-3, f64::NAN, 4.0727e-3, f64::NAN),
    row(80, 1.0353e-3, 1.99, 1.0377e-3, 1.99, 1.0282e-3, 1.99),
    row(160, 2.6795e-4, 1.95, 2.6849e-4, 1.95, 2.6632e-4, 1.95),
    row(320, 6.7449e-5, 1.99, 6.7583e-5, 1.99, 6.7045e-5, 1.99),
];

#[rustfmt::skip]
const M4_1: [ReferenceRow; 4] = [
    row(40, 4.5862e-4, f64::NAN, 4.5917e-4, f64::NAN, 4.5693e-4, f64::NAN),
    row(80, 5.9486e-5, 2.95, 5.9583e-5, 2.95, 5.9193e-5, 2.95),
    row(160, 7.6394e-6, 2.96, 7.6525e-6, 2.96, 7.6002e-6, 2.96),
    row(320, 9.4389e-7, 3.02, 9.4559e-7, 3.02, 9.3887e-7, 3.02),
];

#[rustfmt::skip]
const M4_2: [ReferenceRow; 4] = [
    row(40, 3.5466e-5, f64::NAN, 3.5876e-5, f64::NAN, 3.4130e-5, f64::NAN),
    row(80, 2.8023e-6, 3.66, 2.8302e-6, 3.66, 2.7137e-6, 3.65),
    row(160, 1.8669e-7, 3.91, 1.8835e-7, 3.91, 1.8149e-7, 3.90),
    row(320, 1.2020e-8, 3.96, 1.2124e-8, 3.96, 1.1703e-8, 3.95),
];

/// All published tables with their scheme labels.
pub fn reference_tables() -> Vec<ReferenceTable> {
    vec![
        ReferenceTable { table: TableId::R1, scheme: "gamma=13/50", rows: &R1_0 },
        ReferenceTable { table: TableId::R1, scheme: "gamma=3/4", rows: &R1_1 },
        ReferenceTable { table: TableId::R1, scheme: "gamma=1-1/sqrt2", rows: &R1_2 },
        ReferenceTable { table: TableId::R2, scheme: "gamma=3/10", rows: &R2_0 },
        ReferenceTable { table: TableId::R2, scheme: "gamma=3/4", rows: &R2_1 },
        ReferenceTable { table: TableId::R2, scheme: "gamma=1-1/sqrt2", rows: &R2_2 },
        ReferenceTable { table: TableId::R2B, scheme: "gamma=3/10", rows: &R2B_0 },
        ReferenceTable { table: TableId::R2B, scheme: "gamma=3/4", rows: &R2B_1 },
        ReferenceTable { table: TableId::R2B, scheme: "gamma=1-1/sqrt2", rows: &R2B_2 },
        ReferenceTable { table: TableId::R3, scheme: "gamma=3/10", rows: &R3_0 },
        ReferenceTable { table: TableId::R3, scheme: "gamma=3/4", rows: &R3_1 },
        ReferenceTable { table: TableId::R3, scheme: "gamma=1-1/sqrt2", rows: &R3_2 },
        ReferenceTable { table: TableId::M1, scheme: "SI-PC2 BDF2", rows: &M1_0 },
        ReferenceTable { table: TableId::M1, scheme: "SI-PC3 BDF3", rows: &M1_1 },
        ReferenceTable { table: TableId::M1, scheme: "SI-PC4 BDF4", rows: &M1_2 },
        ReferenceTable { table: TableId::M2, scheme: "SI-PC2 BDF2", rows: &M2_0 },
        ReferenceTable { table: TableId::M2, scheme: "SI-PC3 BDF3", rows: &M2_1 },
        ReferenceTable { table: TableId::M2, scheme: "SI-PC4 BDF4", rows: &M2_2 },
        ReferenceTable { table: TableId::M3, scheme: "SI-PC2 BDF2", rows: &M3_0 },
        ReferenceTable { table: TableId::M3, scheme: "SI-PC3 BDF3", rows: &M3_1 },
        ReferenceTable { table: TableId::M3, scheme: "SI-PC4 BDF4", rows: &M3_2 },
        ReferenceTable { table: TableId::M4, scheme: "SI-PC2 BDF2", rows: &M4_0 },
        ReferenceTable { table: TableId::M4, scheme: "SI-PC3 BDF3", rows: &M4_1 },
        ReferenceTable { table: TableId::M4, scheme: "SI-PC4 BDF4", rows: &M4_2 },
    ]
}

/// Rows of one published table, keyed by scheme label.
pub fn reference_table(table: TableId) -> Vec<ReferenceTable> {
    reference_tables().into_iter().filter(|t| t.table == table).collect()
}
