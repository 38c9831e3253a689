//! Near-RT RIC skeleton: xApp registry, the gated action submission path,
//! the xNIB ledger and the KPI bus.

pub mod bus;
pub mod registry;
pub mod xnib;

use thiserror::Error;

pub use bus::{Delivered, KpiBus, SubscriptionId};
pub use registry::{ParamDomain, ParamSpec, ParameterRegistry, XAppDescriptor, XAppHandle, XAppRegistry};
pub use xnib::{ActionRecord, Outcome, QueryFilter, Xnib};

use crate::sim::{ParamError, ParamId, Simulator, Target, Tick};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RicError {
    #[error("xApp id {0:?} already registered")]
    DuplicateId(String),
    #[error("xApp {0:?} declares no parameters")]
    NoDeclaredParams(String),
    #[error("unknown xApp handle")]
    UnknownHandle,
    #[error("parameter {0} is not in the parameter registry")]
    UnknownParam(ParamId),
    #[error("xApp {xapp_id:?} did not declare parameter {param}")]
    UndeclaredParam { xapp_id: String, param: ParamId },
    #[error("ledger ticks must be non-decreasing (last {last}, got {got})")]
    NonMonotonicTick { last: Tick, got: Tick },
    #[error("query window [{tick_a}, {tick_b}] is inverted")]
    InvalidWindow { tick_a: Tick, tick_b: Tick },
}

/// The writable RAN state behind the RIC.
pub trait ParamSurface {
    fn now(&self) -> Tick;
    fn read(&self, param: ParamId, target: Target) -> Result<f64, ParamError>;
    fn write(&mut self, target: Target, param: ParamId, value: f64) -> Result<(), ParamError>;
}

impl ParamSurface for Simulator {
    fn now(&self) -> Tick {
        self.tick()
    }

    fn read(&self, param: ParamId, target: Target) -> Result<f64, ParamError> {
        self.param_value(param, target)
    }

    fn write(&mut self, target: Target, param: ParamId, value: f64) -> Result<(), ParamError> {
        self.apply_param_change(target, param, value)
    }
}

/// Decides whether a submission is blocked. Implemented by the mitigator.
pub trait ActionGate {
    fn is_blocked(&mut self, xapp_id: &str, target: Target, param: ParamId, now: Tick) -> bool;
}

/// Gate that never blocks (conflict mitigation disabled).
#[derive(Debug, Clone, Copy, Default)]
pub struct OpenGate;

impl ActionGate for OpenGate {
    fn is_blocked(&mut self, _: &str, _: Target, _: ParamId, _: Tick) -> bool {
        false
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ric {
    pub xapps: XAppRegistry,
    pub params: ParameterRegistry,
    xnib: Xnib,
    pub bus: KpiBus,
}

impl Ric {
    pub fn new(params: ParameterRegistry) -> Self {
        Self {
            xapps: XAppRegistry::default(),
            params,
            xnib: Xnib::new(),
            bus: KpiBus::new(),
        }
    }

    pub fn register_xapp(&mut self, desc: XAppDescriptor) -> Result<XAppHandle, RicError> {
        self.xapps.register(desc)
    }

    pub fn xnib(&self) -> &Xnib {
        &self.xnib
    }

    /// Submits a parameter write on behalf of an xApp.
    ///
    /// The gate is consulted first; a blocked write leaves the RAN untouched.
    /// Otherwise the write is forwarded and either applied or rejected by the
    /// RAN's domain checks. Every outcome is appended to the xNIB with the
    /// value read before the write.
    pub fn submit_action<S: ParamSurface, G: ActionGate + ?Sized>(
        &mut self,
        handle: XAppHandle,
        target: Target,
        param: ParamId,
        value: f64,
        ran: &mut S,
        gate: &mut G,
    ) -> Result<Outcome, RicError> {
        let desc = self.xapps.get(handle).ok_or(RicError::UnknownHandle)?;
        if !self.params.contains(param) {
            return Err(RicError::UnknownParam(param));
        }
        if !desc.declared_params.contains(&param) {
            return Err(RicError::UndeclaredParam {
                xapp_id: desc.xapp_id.clone(),
                param,
            });
        }
        let xapp_id = desc.xapp_id.clone();
        let now = ran.now();
        let old_value = ran.read(param, target).unwrap_or(f64::NAN);
        let outcome = if gate.is_blocked(&xapp_id, target, param, now) {
            Outcome::BlockedByPriority
        } else {
            match ran.write(target, param, value) {
                Ok(()) => Outcome::Applied,
                Err(_) => Outcome::Rejected,
            }
        };
        self.xnib.append(ActionRecord {
            tick: now,
            xapp_id,
            target,
            param_id: param,
            old_value,
            new_value: value,
            outcome,
        })?;
        Ok(outcome)
    }
}
