pub mod detect;
pub mod export;
pub mod harness;
pub mod mitigate;
pub mod ric;
pub mod scenario;
pub mod sim;
pub mod xapps;
