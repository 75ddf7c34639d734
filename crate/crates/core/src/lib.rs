//! Public key encryption with equality test and flexible authorization over
//! ideal lattices.
//!
//! ```no_run
//! use pkeet::{Params, Sampler, Scheme};
//!
//! let scheme = Scheme::validated(Params::preset("paper62").unwrap()).unwrap();
//! let mut rng = Sampler::from_seed(7);
//! let (pk, sk) = scheme.setup(&mut rng).unwrap();
//! let m = pkeet::hashing::random_message(scheme.ring(), &mut rng);
//! let ct = scheme.encrypt(&pk, &m, &mut rng).unwrap();
//! assert_eq!(scheme.decrypt(&sk, &pk, &ct, &mut rng).unwrap(), m);
//! ```

pub mod bench;
pub mod codec;
pub mod error;
pub mod gauss;
pub mod hashing;
pub mod params;
pub mod pkeetfa;
pub mod ring;
pub mod trapdoor;

pub use error::{Error, Result};
pub use gauss::Sampler;
pub use hashing::{frd_encode, hash_message, IdentityVector};
pub use params::{GaussParams, Params, Violation};
pub use pkeetfa::{AuthTrapdoor, Ciphertext, PublicKey, Scheme, SecretKey, TrapdoorKind};
pub use ring::{Ring, RingElem, RingVector};
pub use trapdoor::{GTrapdoor, Gadget};
