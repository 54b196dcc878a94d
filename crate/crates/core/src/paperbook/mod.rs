//! Named constructors for the explicit form families and classified algebras, and replay
//! routines that recheck the classification identities.

mod catalog;
mod checks;
mod families;
mod kernels;
mod replay;

pub use catalog::{catalog_isomorphism, hall_images, induced_isomorphism, IsomorphismReport, classified_algebra, classified_algebra_by_name, CatalogEntry, CatalogLabel, CatalogList};
pub use families::{a2prime, c_matrix, family_form, family_matrix, w_gamma, FamilyId, FamilySpec, ParamsJson};
pub use kernels::{check_kernel, printed_kernels, printed_span, resolve_garbled_reading, KernelCheck, PrintedKernel, GARBLED_READINGS, GARBLED_RESOLVED};
pub use checks::{adjugate_congruence_check, cofactor, congruence_class_count, det_twisted_congruence_check};
pub use replay::{replay, replay_theorem, IdentityResult, ReplayConfig, ReplayReport, Tag, TheoremReport};
