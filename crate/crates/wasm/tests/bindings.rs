use mrpyca::io::PyramidDocument;
use mrpyca::Curve;
use mrpyca_wasm::{pyramid_document, simplify_curve, synthesize_curve};

#[test]
fn synthesize_is_flat_and_seeded() {
    let a = synthesize_curve("midpoint", 300, 3, 0.6).unwrap();
    assert_eq!(a.len(), 600);
    assert_eq!(a, synthesize_curve("midpoint", 300, 3, 0.6).unwrap());
    assert_ne!(a, synthesize_curve("midpoint", 300, 4, 0.6).unwrap());
    assert!(synthesize_curve("spiral", 300, 3, 0.6).is_err());
}

#[test]
fn simplify_reports_fidelity() {
    let xy = synthesize_curve("random-walk", 400, 1, 0.3).unwrap();
    let exact = simplify_curve(&xy, "fsdp", 12, 0.5, 2.0).unwrap();
    assert_eq!(exact.fidelity(), 100.0);
    for algo in ["pyca", "mr-pyca", "dp", "merge-l2"] {
        let s = simplify_curve(&xy, algo, 12, 0.6, 4.0).unwrap();
        assert_eq!(s.vertices().len(), 13);
        assert_eq!(s.vertices()[0], 0);
        assert_eq!(*s.vertices().last().unwrap(), 399);
        assert!(s.error() >= exact.error() * (1.0 - 1e-12));
        let expected = 100.0 * exact.error() / s.error();
        assert!((s.fidelity() - expected).abs() < 1e-9 * expected, "{algo}");
    }
}

#[test]
fn simplify_rejects_bad_input() {
    assert!(simplify_curve(&[0.0, 0.0, 1.0], "dp", 1, 0.5, 2.0).is_err());
    assert!(simplify_curve(&[0.0, 0.0, 1.0, 1.0], "dp", 2, 0.5, 2.0).is_err());
    assert!(simplify_curve(&[0.0, 0.0, 1.0, 1.0, 2.0, 0.0], "nope", 1, 0.5, 2.0).is_err());
}

#[test]
fn pyramid_document_verifies() {
    let xy = synthesize_curve("koch", 500, 2, 0.5).unwrap();
    let doc = PyramidDocument::from_json(&pyramid_document(&xy, 10, 0.5, 3.0).unwrap()).unwrap();
    let curve = Curve::from_flat(xy, 2).unwrap();
    assert!(doc.verify(&curve, 1e-9).passed());
    assert_eq!(doc.levels.last().unwrap().segments, 10);
}
