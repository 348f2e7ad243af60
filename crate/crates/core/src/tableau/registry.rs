#![allow(clippy::excessive_precision)]

use super::{Family, Kind, MethodTableau, TableauSpec};
use nalgebra::{DMatrix, DVector};
use std::sync::OnceLock;

struct Entry {
    name: &'static str,
    d_row: &'static [f64],
    a: &'static [f64],
    a_hat: &'static [f64],
    r: &'static [f64],
    r_hat: &'static [f64],
    p: usize,
    kind: Kind,
    family: Family,
    ssp: Option<f64>,
    tau: Option<&'static [f64]>,
}

impl Entry {
    fn spec(&self) -> TableauSpec {
        let s = self.d_row.len();
        let sq = |v: &[f64]| DMatrix::from_row_slice(s, s, v);
        TableauSpec {
            name: self.name.to_string(),
            d: DMatrix::from_fn(s, s, |_, j| self.d_row[j]),
            a: sq(self.a),
            a_hat: sq(self.a_hat),
            r: sq(self.r),
            r_hat: sq(self.r_hat),
            p: self.p,
            order: self.p + self.kind.order_gain(),
            kind: self.kind,
            family: self.family,
            ssp_coefficient: self.ssp,
            stored_tau: self.tau.map(DVector::from_row_slice),
        }
    }
}

const ENTRIES: &[Entry] = &[
    Entry {
        name: "eEIS(2,3)_2",
        d_row: &[1.347635863512091, -0.347635863512091],
        a: &[1.110588320380528, 0.206278390370703, 1.160801319467423, 0.191968442856969],
        a_hat: &[0.376508598017949, 0.079881117612918, 0.424704932282709, 0.083778591655645],
        r: &[0.0, 0.0, 0.875587228946215, 0.0],
        r_hat: &[0.0, 0.0, 0.412259887079832, 0.0],
        p: 2,
        kind: Kind::Eis,
        family: Family::Explicit,
        ssp: None,
        tau: None,
    },
    Entry {
        name: "eEIS+(2,5)_2",
        d_row: &[0.500023658051142, 0.499976341948858],
        a: &[0.627069692131650, 0.151022064558538, 0.709712162750524, 0.848963643214302],
        a_hat: &[0.058142153689242, 0.325582994094698, 0.108273930132603, 0.477624731406111],
        r: &[0.0, 0.0, -0.336746561995068, 0.0],
        r_hat: &[0.0, 0.0, 0.367133756538675, 0.0],
        p: 3,
        kind: Kind::EisPlus,
        family: Family::Explicit,
        ssp: None,
        tau: Some(&[-0.039533847641586, 0.039537588993770]),
    },
    Entry {
        name: "eEIS+(2,6)_2",
        d_row: &[0.193021555206000, 0.806978444794000],
        a: &[1.089589263420254, -0.469532861646008, 1.011690204056872, 1.112307786855907],
        a_hat: &[0.196914195858807, 0.434709438834146, 0.130811273979010, 0.871687677021200],
        r: &[0.0, 0.0, -1.033119102271808, 0.0],
        r_hat: &[0.0, 0.0, 0.499137031946415, 0.0],
        p: 4,
        kind: Kind::EisPlus,
        family: Family::Explicit,
        ssp: None,
        tau: Some(&[-0.037857689452761, 0.009055198613815]),
    },
    Entry {
        name: "eEIS+(3,7)_2",
        d_row: &[1.581021525561460, -0.598751979308602, 0.017730453747142],
        a: &[
            0.931591460185742, 0.379244369981835, -0.172141957956410,
            0.938547162180577, 0.508131122095280, -0.363857858559788,
            0.504648760586788, 1.046850936001111, -0.659275924405796,
        ],
        a_hat: &[
            0.057154143906362, 0.302522642478094, 0.175689200743141,
            0.045099335357263, 0.359020777972142, 0.164798140168151,
            -0.060217523878309, 0.456569929293375, -0.005615338892051,
        ],
        r: &[
            0.0, 0.0, 0.0,
            0.307438691150295, 0.0, 0.0,
            1.789973573982305, -0.870575633439973, 0.0,
        ],
        r_hat: &[
            0.0, 0.0, 0.0,
            0.038804362951013, 0.0, 0.0,
            0.227157707727078, 0.276283023303938, 0.0,
        ],
        p: 5,
        kind: Kind::EisPlus,
        family: Family::Explicit,
        ssp: None,
        tau: Some(&[-0.003599790543666, -0.012406980352919, -0.097987210664809]),
    },
    Entry {
        name: "eEIS+(4,8)_2",
        d_row: &[1.126765222628176, 0.808129178515260, -0.107647150078402, -0.827247251065033],
        a: &[
            0.567574025309926, 0.723999455772069, 0.208196137734782, 0.023532165559543,
            0.749691669482323, 0.430151531239573, 0.359568096205409, -0.030974711893773,
            0.602555996794216, 0.745759221902972, 0.048559187429251, -0.267889537378177,
            1.051588361923041, -0.047355340428569, 0.863960642835203, 0.214102220881218,
        ],
        a_hat: &[
            0.041975696597772, 0.205746598967380, 0.137652258393657, 0.039122406247340,
            0.064927843091523, 0.213465637934016, 0.160720650985361, -0.047428374982532,
            0.056975020786010, 0.171669459177575, 0.226994033551341, -0.021617692260293,
            0.095018403341495, 0.263066907087928, 0.147903147440657, -0.036525606967693,
        ],
        r: &[
            0.0, 0.0, 0.0, 0.0,
            0.296825313241825, 0.0, 0.0, 0.0,
            0.379857836431130, 0.610459020171445, 0.0, 0.0,
            0.079086170545983, 0.114409044614819, 0.077980998192235, 0.0,
        ],
        r_hat: &[
            0.0, 0.0, 0.0, 0.0,
            0.095598816350501, 0.0, 0.0, 0.0,
            -0.143446089841412, 0.076113483149991, 0.0, 0.0,
            0.309290513515929, 0.063106409144583, 0.076129207423402, 0.0,
        ],
        p: 6,
        kind: Kind::EisPlus,
        family: Family::Explicit,
        ssp: None,
        tau: Some(&[-0.000997109517747, -0.006485724807936, -0.023117224006582, -0.004685791946531]),
    },
    Entry {
        name: "eSSP-EIS(2,3)_2",
        d_row: &[7.0 / 16.0, 9.0 / 16.0],
        a: &[2.0 / 8.0, 3.0 / 8.0, 2.0 / 8.0, 3.0 / 8.0],
        a_hat: &[0.0, 1.0 / 8.0, 0.0, 1.0 / 8.0],
        r: &[0.0, 0.0, 2.0 / 3.0, 0.0],
        r_hat: &[0.0, 0.0, 2.0 / 9.0, 0.0],
        p: 2,
        kind: Kind::Eis,
        family: Family::ExplicitSsp,
        ssp: Some(1.5),
        tau: None,
    },
    Entry {
        name: "eSSP-EIS+(2,4)_2",
        d_row: &[0.435605756635718, 0.564394243364282],
        a: &[0.232303428413552, 0.564394243364282, 0.216263460427852, 0.564394243364282],
        a_hat: &[0.000000005124887, 0.260081562620613, 0.000000001928255, 0.146835746492061],
        r: &[0.0, 0.0, 0.376253295127924, 0.0],
        r_hat: &[0.0, 0.0, 0.162082671864920, 0.0],
        p: 2,
        kind: Kind::EisPlus,
        family: Family::ExplicitSsp,
        ssp: Some(1.0),
        tau: Some(&[-0.063938362828511, 0.049348339827035]),
    },
    Entry {
        name: "eSSP-EIS+(3,6)_2",
        d_row: &[0.235787420033905, 0.332249926343388, 0.431962653622707],
        a: &[
            0.179040619183497, 0.0, 0.400647796399945,
            0.147616987633695, 0.118289307755180, 0.400647796399945,
            0.194101834261448, 0.212027154638658, 0.400647796399945,
        ],
        a_hat: &[
            0.032860477842919, 0.0, 0.068024553668439,
            0.024965463148830, 0.034155124171981, 0.021087452933654,
            0.011487692416560, 0.092903917927740, 0.124915188800131,
        ],
        r: &[
            0.0, 0.0, 0.0,
            0.287524583705647, 0.0, 0.0,
            0.214948333287866, 0.243023557774243, 0.0,
        ],
        r_hat: &[
            0.0, 0.0, 0.0,
            0.133340336145235, 0.0, 0.0,
            0.050250968106130, 0.112702859933545, 0.0,
        ],
        p: 4,
        kind: Kind::EisPlus,
        family: Family::ExplicitSsp,
        ssp: Some(1.0782),
        tau: Some(&[-0.010752778908703, -0.021534888908005, 0.022433270953649]),
    },
    Entry {
        name: "iEIS+(2,4)_2",
        d_row: &[0.594710614896760, 0.405289385103240],
        a: &[-2.187376304427630, -0.964459220078949, -1.117865907067007, 2.067845436796621],
        a_hat: &[0.778080609332642, -1.088765766927099, -2.898999040140121, 1.440243113199464],
        r: &[3.949190831954959, 0.0, 0.0, 0.347375777718766],
        r_hat: &[-2.706937237458932, 0.0, 0.0, 0.978108368826293],
        p: 2,
        kind: Kind::EisPlus,
        family: Family::Implicit,
        ssp: None,
        tau: Some(&[-3.111010490530440, 4.565012136457357]),
    },
    Entry {
        name: "iEIS+(3,5)_2",
        d_row: &[0.439087264857344, 0.700945256500558, -0.140032521357901],
        a: &[
            2.507826539020301, 3.279683213077780, -1.170881137598611,
            -0.334032190141782, -4.031402321497854, 0.685583668720811,
            -1.750770284075905, -4.999999998880823, 3.295317723260540,
        ],
        a_hat: &[
            2.333968082671988, 0.419378200972933, -2.408406401605122,
            -2.145600247202041, 0.897829295036851, -0.721006948644857,
            -4.988816152192916, 3.020756581381562, -1.533772624102988,
        ],
        r: &[
            -3.756922019094389, 0.0, 0.0,
            0.0, 4.872890771657239, 0.0,
            0.0, 0.0, 4.981825821767937,
        ],
        r_hat: &[
            3.591518759368352, 0.0, 0.0,
            0.0, -2.760598976218027, 0.0,
            0.0, 0.0, -3.950356833416136,
        ],
        p: 3,
        kind: Kind::EisPlus,
        family: Family::Implicit,
        ssp: None,
        tau: Some(&[3.466008686399261, -4.575755330149971, -12.036302018622621]),
    },
];

/// All built-in methods, validated once on first use.
pub fn registry() -> &'static [MethodTableau] {
    static REGISTRY: OnceLock<Vec<MethodTableau>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        ENTRIES
            .iter()
            .map(|e| {
                MethodTableau::from_spec(e.spec())
                    .unwrap_or_else(|err| panic!("built-in method {} is invalid: {err}", e.name))
            })
            .collect()
    })
}

/// Finds a built-in method by name. The trailing `_2` (two-derivative)
/// suffix may be omitted.
pub fn lookup(name: &str) -> Option<&'static MethodTableau> {
    let name = name.trim();
    registry()
        .iter()
        .find(|t| t.name() == name || t.name().strip_suffix("_2") == Some(name))
}
