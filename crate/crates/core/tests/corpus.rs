mod common;

use frontsheaf::front::FrontComplex;

#[test]
fn every_corpus_front_validates() {
    for name in common::CORPUS {
        let f = FrontComplex::load(&common::corpus_path(name)).unwrap();
        assert_eq!(f.validate(), vec![], "{name}");
        assert_eq!(f.base_dim(), 2, "{name}");
    }
}
