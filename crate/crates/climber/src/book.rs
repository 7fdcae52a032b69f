//! Compile-checks every code snippet in the guide. Each chapter of the
//! book is attached as documentation to an empty module here, so `cargo
//! test` runs the snippets as doc-tests and the guide can never drift
//! from the library.

macro_rules! chapter {
    ($name:ident, $file:literal) => {
        #[doc = include_str!(concat!("../../../book/src/", $file))]
        mod $name {}
    };
}

#[doc = include_str!("../../../README.md")]
mod readme {}

chapter!(introduction, "introduction.md");
chapter!(chains, "chains.md");
chapter!(free_space, "free-space.md");
chapter!(distances, "distances.md");
chapter!(stations, "stations.md");
chapter!(covers, "covers.md");
chapter!(hardness, "hardness.md");
chapter!(cli, "cli.md");
