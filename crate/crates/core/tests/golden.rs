mod common;

use std::process::Command;

use gallina_scala::codegen::{translate_with, Options};
use gallina_scala::{render, translate};

fn golden() -> String {
    common::read(&common::golden_dir().join("CertifiedTree.scala"))
}

#[test]
fn tree_matches_golden() {
    let (program, symbols) = common::load(&common::read(&common::corpus_dir().join("tree.v")));
    assert_eq!(render(&translate(&program, &symbols, "CertifiedTree")), golden());
}

#[test]
fn lemmas_without_comments_match_golden() {
    let (program, symbols) = common::load(&common::read(&common::corpus_dir().join("tree_lemmas.v")));
    let options = Options { wrapper_name: "CertifiedTree".into(), lemma_comments: false };
    assert_eq!(render(&translate_with(&program, &symbols, &options)), golden());
}

#[test]
fn crlf_input_gives_same_output() {
    let src = common::read(&common::corpus_dir().join("tree.v")).replace('\n', "\r\n");
    let (program, symbols) = common::load(&src);
    assert_eq!(render(&translate(&program, &symbols, "CertifiedTree")), golden());
}

#[test]
fn binary_writes_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("CertifiedTree.scala");
    let status = Command::new(env!("CARGO_BIN_EXE_gallina2scala"))
        .arg(common::corpus_dir().join("tree.v"))
        .args(["--object-name", "CertifiedTree", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(common::read(&out), golden());
}
