use cbindgen::{Builder, Language};

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    Builder::new()
        .with_crate(&crate_dir)
        .with_language(Language::C)
        .with_include_guard("QCF_H")
        .with_cpp_compat(true)
        .generate()
        .expect("cbindgen generates the header")
        .write_to_file(format!("{crate_dir}/include/qcf.h"));
}
