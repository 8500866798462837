//! JSON channel specifications.
//!
//! ```json
//! {"builtin": "brickwork", "layers": 2, "gate": "cz"}
//! {"kraus": [{"support": [0], "dims": [2], "re": [[1,0],[0,1]]}]}
//! {"cjs": {"support": ["0", "0'"], "dims": [2, 2], "re": [...], "im": [...]}}
//! {"unitary": {...}}
//! {"dilated": [{...gate...}, ...], "ancilla": [1, 0]}
//! ```

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::builtin::{self, BrickGate, PairConvention};
use super::{Channel, Circuit};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::tensor::{c, DenseOperator};

fn default_layers() -> usize {
    1
}

fn default_p() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builtin", rename_all = "lowercase")]
pub enum Builtin {
    Identity,
    Example1,
    Example2,
    Example3 {
        #[serde(default)]
        convention: PairConvention,
    },
    Shift,
    Swap {
        a: usize,
        b: usize,
    },
    Brickwork {
        #[serde(default = "default_layers")]
        layers: usize,
        #[serde(default)]
        gate: BrickGate,
        #[serde(default)]
        seed: u64,
    },
    Product {
        #[serde(default)]
        seed: u64,
    },
    Depolarizing {
        #[serde(default = "default_p")]
        p: f64,
    },
    Dilated {
        #[serde(default)]
        seed: u64,
    },
}

impl Builtin {
    /// Builtin with default parameters, by name.
    pub fn by_name(name: &str) -> Result<Self> {
        let value = serde_json::json!({ "builtin": name });
        serde_json::from_value(value).map_err(|_| Error::InvalidSpec(format!("unknown or incomplete builtin `{name}`")))
    }

    pub fn build(&self, lattice: &Lattice) -> Result<Channel> {
        match *self {
            Builtin::Identity => Channel::identity(lattice),
            Builtin::Example1 => builtin::example1(lattice),
            Builtin::Example2 => builtin::example2(lattice),
            Builtin::Example3 { convention } => builtin::example3(lattice, convention),
            Builtin::Shift => builtin::shift(lattice),
            Builtin::Swap { a, b } => builtin::swap(lattice, a, b),
            Builtin::Brickwork { layers, gate, seed } => builtin::brickwork(lattice, layers, gate, seed),
            Builtin::Product { seed } => builtin::product_unitary(lattice, seed),
            Builtin::Depolarizing { p } => builtin::depolarizing(lattice, p),
            Builtin::Dilated { seed } => builtin::random_dilated(lattice, seed),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Builtin(Builtin),
    Kraus {
        kraus: Vec<DenseOperator>,
    },
    Cjs {
        cjs: DenseOperator,
    },
    Unitary {
        unitary: DenseOperator,
    },
    Dilated {
        dilated: Circuit,
        #[serde(default)]
        ancilla: Option<Vec<f64>>,
    },
}

impl ChannelSpec {
    /// Parses `builtin:NAME` or a JSON document.
    pub fn parse(text: &str) -> Result<Self> {
        if let Some(name) = text.strip_prefix("builtin:") {
            return Ok(ChannelSpec::Builtin(Builtin::by_name(name.trim())?));
        }
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("channel spec: {e}")))
    }

    pub fn build(&self, lattice: &Lattice) -> Result<Channel> {
        match self {
            ChannelSpec::Builtin(b) => b.build(lattice),
            ChannelSpec::Kraus { kraus } => Channel::from_kraus(lattice, kraus.clone()),
            ChannelSpec::Cjs { cjs } => Channel::from_cjs(lattice, cjs.clone()),
            ChannelSpec::Unitary { unitary } => Channel::unitary(lattice, unitary.clone()),
            ChannelSpec::Dilated { dilated, ancilla } => {
                let init = ancilla.as_ref().map(|v| DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))));
                Channel::dilated(lattice, dilated, init.as_ref())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;

    #[test]
    fn builtin_specs_parse() {
        assert_eq!(Builtin::by_name("example1").unwrap(), Builtin::Example1);
        let spec: ChannelSpec = serde_json::from_str(r#"{"builtin": "brickwork", "layers": 2, "gate": "cz"}"#).unwrap();
        assert!(matches!(spec, ChannelSpec::Builtin(Builtin::Brickwork { layers: 2, gate: BrickGate::Cz, seed: 0 })));
        assert!(ChannelSpec::parse("builtin:nonsense").is_err());
        assert!(ChannelSpec::parse("builtin:swap").is_err());
    }

    #[test]
    fn kraus_spec_builds_a_channel() {
        let lat = Lattice::chain(2, Boundary::Open).unwrap();
        let text = r#"{"kraus": [{"support": [1], "dims": [2], "re": [[0, 1], [1, 0]]}]}"#;
        let ch = ChannelSpec::parse(text).unwrap().build(&lat).unwrap();
        assert_eq!(ch.stored_kraus().unwrap()[0].support().len(), 2);
        let bad = r#"{"kraus": [{"support": [1], "dims": [2], "re": [[0, 1], [0, 0]]}]}"#;
        assert!(matches!(ChannelSpec::parse(bad).unwrap().build(&lat), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn dilated_spec_round_trips() {
        let text = r#"{"dilated": [{"support": ["0", "0'"], "dims": [2, 2],
            "re": [[1,0,0,0],[0,0,1,0],[0,1,0,0],[0,0,0,1]]}]}"#;
        let spec = ChannelSpec::parse(text).unwrap();
        let again = ChannelSpec::parse(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert!(matches!(again, ChannelSpec::Dilated { .. }));
        let not_unitary = text.replace("[0,0,0,1]]", "[0,0,0,2]]");
        assert!(ChannelSpec::parse(&not_unitary).is_err());
    }
}
