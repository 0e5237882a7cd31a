//! Bundled sweep configs for the published figures, one per plotted series.

pub const FIGURES: &[(&str, &[(&str, &str)])] = &[
    (
        "fig3",
        &[
            ("fig3_bin24", include_str!("../configs/fig3_bin24.conf")),
            ("fig3_cat6", include_str!("../configs/fig3_cat6.conf")),
        ],
    ),
    (
        "fig4",
        &[
            ("fig4_cat4_K1", include_str!("../configs/fig4_cat4_K1.conf")),
            ("fig4_cat8_K2", include_str!("../configs/fig4_cat8_K2.conf")),
            ("fig4_cat16_K3", include_str!("../configs/fig4_cat16_K3.conf")),
        ],
    ),
    (
        "fig5",
        &[
            ("fig5_cat_p0", include_str!("../configs/fig5_cat_p0.conf")),
            ("fig5_cat_p0.05", include_str!("../configs/fig5_cat_p0.05.conf")),
            ("fig5_cat_p0.1", include_str!("../configs/fig5_cat_p0.1.conf")),
            ("fig5_sqcat_p0", include_str!("../configs/fig5_sqcat_p0.conf")),
            ("fig5_sqcat_p0.05", include_str!("../configs/fig5_sqcat_p0.05.conf")),
            ("fig5_sqcat_p0.1", include_str!("../configs/fig5_sqcat_p0.1.conf")),
        ],
    ),
    (
        "fig6",
        &[
            ("fig6_loss_L0", include_str!("../configs/fig6_loss_L0.conf")),
            ("fig6_loss_L1", include_str!("../configs/fig6_loss_L1.conf")),
            ("fig6_loss_L2", include_str!("../configs/fig6_loss_L2.conf")),
            ("fig6_thermal_L0", include_str!("../configs/fig6_thermal_L0.conf")),
            ("fig6_thermal_L1", include_str!("../configs/fig6_thermal_L1.conf")),
            ("fig6_thermal_L2", include_str!("../configs/fig6_thermal_L2.conf")),
        ],
    ),
    (
        "fig7",
        &[
            ("fig7_cf", include_str!("../configs/fig7_cf.conf")),
            ("fig7_bypass", include_str!("../configs/fig7_bypass.conf")),
        ],
    ),
    (
        "fig8",
        &[
            ("fig8_bin24_qubit", include_str!("../configs/fig8_bin24_qubit.conf")),
            ("fig8_bin24_qutrit", include_str!("../configs/fig8_bin24_qutrit.conf")),
            ("fig8_cat2_qubit", include_str!("../configs/fig8_cat2_qubit.conf")),
            ("fig8_cat2_qutrit", include_str!("../configs/fig8_cat2_qutrit.conf")),
            ("fig8_gkp_qubit", include_str!("../configs/fig8_gkp_qubit.conf")),
            ("fig8_gkp_qutrit", include_str!("../configs/fig8_gkp_qutrit.conf")),
        ],
    ),
    (
        "fig9",
        &[
            ("fig9_K1", include_str!("../configs/fig9_K1.conf")),
            ("fig9_K2", include_str!("../configs/fig9_K2.conf")),
            ("fig9_K3", include_str!("../configs/fig9_K3.conf")),
        ],
    ),
    (
        "fig10c",
        &[
            ("fig10c_bin24_loss_00", include_str!("../configs/fig10c_bin24_loss_00.conf")),
            ("fig10c_bin24_loss_00_11", include_str!("../configs/fig10c_bin24_loss_00_11.conf")),
            ("fig10c_bin24_thermal_00", include_str!("../configs/fig10c_bin24_thermal_00.conf")),
            ("fig10c_bin24_thermal_00_11", include_str!("../configs/fig10c_bin24_thermal_00_11.conf")),
            ("fig10c_cat2_loss_00", include_str!("../configs/fig10c_cat2_loss_00.conf")),
            ("fig10c_cat2_loss_00_11", include_str!("../configs/fig10c_cat2_loss_00_11.conf")),
            ("fig10c_cat2_thermal_00", include_str!("../configs/fig10c_cat2_thermal_00.conf")),
            ("fig10c_cat2_thermal_00_11", include_str!("../configs/fig10c_cat2_thermal_00_11.conf")),
            ("fig10c_gkp_loss_00", include_str!("../configs/fig10c_gkp_loss_00.conf")),
            ("fig10c_gkp_loss_00_11", include_str!("../configs/fig10c_gkp_loss_00_11.conf")),
            ("fig10c_gkp_thermal_00", include_str!("../configs/fig10c_gkp_thermal_00.conf")),
            ("fig10c_gkp_thermal_00_11", include_str!("../configs/fig10c_gkp_thermal_00_11.conf")),
            ("fig10c_teleport", include_str!("../configs/fig10c_teleport.conf")),
        ],
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    FIGURES.iter().map(|(n, _)| *n)
}

/// `(config name, config text)` pairs for one figure.
pub fn configs(figure: &str) -> Option<&'static [(&'static str, &'static str)]> {
    FIGURES.iter().find(|(n, _)| *n == figure).map(|(_, c)| *c)
}
