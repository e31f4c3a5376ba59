//! Wassermann-type inclusions `B ⊆ C = (A ⊗ B(H_π))^G`, the expectation
//! `E = ι ⊗ θ_π`, quasi-bases and the Watatani index.
//!
//! For truncated cores every entry of `C` and of `A ⊡ H_π` has degree at
//! most `2 d_π`, so the window must satisfy `2 d_π ≤ W`.

pub mod inclusion;
pub mod quasi;
pub mod rep;
pub mod structure;
pub mod theorem;

pub use inclusion::{build_inclusion, ExpectationReport, InclusionReport, WassermannInclusion};
pub use quasi::{eigenmatrix_check, faithfulness, quasi_basis, EigenmatrixReport, FaithfulnessReport, QuasiBasis, QuasiBasisReport};
pub use rep::{equivariant_space, AmpElement, Rep};
pub use structure::{two_sided_structure, Frame, Side, StructureReport, TwoSidedStructure};
pub use theorem::{index_theorem_check, ConstructionReport, IndexTheoremReport};
