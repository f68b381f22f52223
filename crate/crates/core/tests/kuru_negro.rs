use hamext::classical::extend;
use hamext::ladder::{kuru_negro, m_identity, Sign};
use hamext::systems::ttw_angular;

#[test]
fn ttw_kuru_negro_relations() {
    let sys = ttw_angular();
    let base = sys.base.clone().unwrap();
    let lp = sys.ladder.clone().unwrap();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        let p = sys.extension_params(m, n, 0.5).unwrap();
        let ext = extend(&base, &p);
        let kn = kuru_negro(&ext, &lp).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            for (what, cmp) in [
                ("g", kn.relation_g(&ext, sign)),
                ("a", kn.relation_a(&ext, sign)),
                ("d", kn.relation_d(&ext, sign)),
                ("x", kn.conservation(&ext, sign)),
            ] {
                let out = cmp.run(&sys.domain, 20, 1e-7).unwrap();
                assert!(out.passed, "({m},{n}) {what} {sign:?} {out:?}");
            }
        }
        let out = kn.h_factorization(&ext).run(&sys.domain, 40, 1e-9).unwrap();
        assert!(out.passed, "h ({m},{n}) {out:?}");
        let out = kn.d_factorization(&ext).run(&sys.domain, 40, 1e-9).unwrap();
        assert!(out.passed, "d ({m},{n}) {out:?}");
        let out = m_identity(&ext, &kn, &lp).run(&sys.domain, 40, 1e-9).unwrap();
        assert!(out.passed, "m ({m},{n}) {out:?}");
    }
}
