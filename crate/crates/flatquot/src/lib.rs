//! Exact-arithmetic toolkit for studying Cayley-graph diameters of finite
//! quotients of soluble groups.
//!
//! The library builds explicit families of finite quotients of groups of the
//! form `K(M_1, ..., M_m) ⋊ Z^m` (commuting rational matrices acting on a
//! subgroup of `Q^n`), of Baumslag-Solitar groups `BS(1,k)`, and of wreath
//! products `Z_p ≀ Z`, measures their word-metric diameters exactly by
//! breadth-first search, and tests whether the sequence admits a uniform
//! polynomial lower bound `diam_S(G/H) ≥ ε·[G:H]^α`.
//!
//! Everything is exact: rationals are arbitrary-precision reduced fractions,
//! finite-field work is done with explicit residues, and the flatness verdict
//! compares cross-multiplied integer powers rather than floats.
//!
//! The crate is organised along the pipeline:
//!
//! * [`exact_arith`] — rationals, the ring of `D`-integers, rational modular
//!   arithmetic, multiplicative orders, primality.
//! * [`polynomials`] — monic rational polynomials, reduction mod `p`,
//!   complete-splitting tests, splitting-prime search, root-order lcm
//!   `λ(P,p)`, cyclotomic polynomials and the roots-of-unity decision.
//! * [`matrices`] — exact rational matrix algebra for commuting families:
//!   characteristic polynomials, finite-generation criterion, simultaneous
//!   triangularization over `F_p`, index-`p` subgroups, nilpotency bounds.
//! * [`finite_groups`] — concrete finite metabelian groups `A ⋊ B`, exact BFS
//!   diameter, subgroup lattices at small scale, lower central series, and
//!   the conjugate-generation machinery.
//! * [`families`] — constructors for the quotient families and the batch
//!   driver producing [`families::QuotientRecord`]s.
//! * [`flatness`] — the `u.q.` harness: exact violation verdicts, exponent
//!   trends, CSV/JSON reports.

pub mod exact_arith;
pub mod families;
pub mod finite_groups;
pub mod flatness;
pub mod matrices;
pub mod polynomials;

#[doc(hidden)]
pub mod book;

pub use exact_arith::{PrimeSet, Rational};
pub use families::{FamilySpec, QuotientRecord};
pub use finite_groups::{Element, FiniteMetabelian, GeneratingSet};
pub use flatness::{FlatnessSeries, Verdict};
pub use matrices::{CommutingFamily, QMatrix, TriangularizationCert};
pub use polynomials::{MonicPoly, SplitReport};
