//! Mellin transform of the variance functional against 40-digit reference
//! values. The reference sums the k-series in closed form by expanding the
//! geometric factor over bit strings grouped by length and number of ones.

use fringe_core::patricia::{patricia_var_const, MellinKernel, SourceParams};
use fringe_core::TreeShape;
use num_complex::Complex64;

// (shape, p, re s, im s, re M_V(s), im M_V(s))
const M_V_REFERENCE: &[(&str, f64, f64, f64, f64, f64)] = &[
    ("(*,*)", 0.5, -1.0, 0.0, 0.11566510439955824, 0.0),
    ("(*,*)", 0.5, -1.0, -9.064720283654388, -6.295548103261816e-06, 5.015539932421551e-06),
    ("(*,*)", 0.5, 0.5, 3.0, 0.07941924744844778, 0.11768723074329333),
    ("(*,(*,*))", 0.5, -1.0, 0.0, 0.047176690907899735, 0.0),
    ("(*,(*,*))", 0.5, -1.0, -9.064720283654388, 4.002091007190278e-06, 3.672860750383425e-06),
    ("(*,(*,*))", 0.5, 0.5, 3.0, -0.04103571248741765, 0.016255388666472432),
    ("((*,*),(*,*))", 0.5, -1.0, 0.0, 0.025785440506195117, 0.0),
    ("((*,*),(*,*))", 0.5, -1.0, -9.064720283654388, 4.623758876430247e-06, -7.06578639241728e-06),
    ("((*,*),(*,*))", 0.5, 0.5, 3.0, -0.033466914271840106, -0.035562337161585626),
    ("(*,(*,(*,*)))", 0.5, -1.0, 0.0, 0.009809493389577236, 0.0),
    ("(*,(*,(*,*)))", 0.5, -1.0, -9.064720283654388, -1.3009845546362822e-08, -2.1389577300472813e-06),
    ("(*,(*,(*,*)))", 0.5, 0.5, 3.0, -0.008031379358533866, -0.017646336664870647),
    ("(*,*)", 0.3, -1.0, 0.0, 0.09767497361002668, 0.0),
    ("(*,*)", 0.3, -1.0, -9.064720283654388, -2.906067210775925e-06, 5.1745347831844734e-06),
    ("(*,*)", 0.3, 0.5, 3.0, 0.06414439684881518, 0.09170926546111005),
    ("(*,(*,*))", 0.3, -1.0, 0.0, 0.026747845669977236, 0.0),
    ("(*,(*,*))", 0.3, -1.0, -9.064720283654388, 1.1537407374978702e-06, -4.406751199777228e-07),
    ("(*,(*,*))", 0.3, 0.5, 3.0, -0.021271351629220104, -0.001507177523707429),
    ("((*,*),(*,*))", 0.3, -1.0, 0.0, 0.018641021122246363, 0.0),
    ("((*,*),(*,*))", 0.3, -1.0, -9.064720283654388, -2.429524675416236e-07, -1.3125187954170208e-06),
    ("((*,*),(*,*))", 0.3, 0.5, 3.0, -0.02090719304390613, -0.027352413693757918),
    ("(*,(*,(*,*)))", 0.3, -1.0, 0.0, 0.0018649544408981366, 0.0),
    ("(*,(*,(*,*)))", 0.3, -1.0, -9.064720283654388, -1.3285990820692345e-07, -3.4652926293720743e-07),
    ("(*,(*,(*,*)))", 0.3, 0.5, 3.0, -0.0012267748100162148, -0.0036087022559200396),
];

// (shape, p, constant term of Var N_t / n); the periodic entries include
// the sum of squared Fourier coefficients contributed by the square term
const VARIANCE_REFERENCE: &[(&str, f64, f64)] = &[
    ("(*,*)", 0.5, 0.03678391067977128),
    ("(*,(*,*))", 0.5, 0.05993122768901351),
    ("((*,*),(*,*))", 0.5, 0.035167925454066364),
    ("(*,(*,(*,*)))", 0.5, 0.013926262834402953),
    ("(*,*)", 0.3, 0.041714961413355706),
    ("(*,(*,*))", 0.3, 0.04112780489380579),
    ("((*,*),(*,*))", 0.3, 0.029212863677522818),
    ("(*,(*,(*,*)))", 0.3, 0.0030434039416377154),
];

#[test]
fn variance_transform_matches_reference() {
    for &(shape, p, sr, si, vr, vi) in M_V_REFERENCE {
        let t = TreeShape::parse(shape).unwrap();
        let kernel = MellinKernel::new(&t, SourceParams::new(p).unwrap()).unwrap();
        let got = kernel.m_v(Complex64::new(sr, si)).unwrap();
        let want = Complex64::new(vr, vi);
        let err = (got - want).norm();
        // absolute floor: values near 1e-7 come from O(1e-2) terms
        assert!(err <= 1e-10 * want.norm() + 1e-15, "{shape} p={p} s={sr}+{si}i: {got} vs {want}");
    }
}

#[test]
fn variance_constants_match_reference() {
    for &(shape, p, want) in VARIANCE_REFERENCE {
        let t = TreeShape::parse(shape).unwrap();
        let v = patricia_var_const(&t, SourceParams::new(p).unwrap(), 8).unwrap();
        assert!((v.constant - want).abs() <= 1e-12 * want, "{shape} p={p}: {} vs {want}", v.constant);
    }
}
