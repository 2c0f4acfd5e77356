//! Counting points on trace/norm varieties and toric hypersurfaces over
//! finite fields, with exact checks of the character-sum bounds.

pub mod bounds;
pub mod character;
pub mod counting;
pub mod field;
pub mod harness;

pub use bounds::{BoundName, BoundVerdict, Radius};
pub use character::{CharacterEngine, ComplexValue, MultiplicativeCharacter};
pub use counting::{CountOptions, CountRecord, ToricCounter, TraceNormTable};
pub use field::{build_extension, build_field, build_prime_field, embed, Elem, Field, FieldSpec, Tower};
pub use harness::{Check, SweepConfig, SweepReport, Verdict};
