//! Quaternion classes on the surface, their local invariants, and the adelic verdict.

mod class;
mod profile;
mod realize;
mod verdict;

pub use class::{eval_class, standard_classes, BrauerClass, LocalClass, SymbolRep};
pub use profile::{
    invariant_profile, joint_profile, joint_profile_enumerated, joint_profile_local, Caps,
    InvariantProfile, JointProfile, ProfileStatus, Witness,
};
pub use realize::{
    all_pairs, check_local_hypotheses, odd_order_classes, odd_order_global, quartic_class_eval,
    realize_pairs, split_ramified_classes, split_ramified_global, sqrt_zp, QuarticEval,
    Realization, RealizedPoint, Setting,
};
pub use verdict::{
    bm_verdict, bm_verdict_with, relevant_places, thm11_consistency, verdict_for, AdelicVerdict,
    PlaceWitness, Verdict,
};
