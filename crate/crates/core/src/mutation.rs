//! Deliberate defects used as negative controls for the suites.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// `V(u,i,p)` membership ignores the sign condition.
    VIgnoresSign,
    /// `Λ_{j+1}` keeps nodes whose range contains an excluded `k`.
    LambdaKeepsForbidden,
    /// Fragments are built from sequences that may repeat values.
    NodeSkipsInjectivity,
}

impl std::str::FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Mutation::None),
            "v-ignores-sign" => Ok(Mutation::VIgnoresSign),
            "lambda-keeps-forbidden" => Ok(Mutation::LambdaKeepsForbidden),
            "node-skips-injectivity" => Ok(Mutation::NodeSkipsInjectivity),
            other => Err(format!("unknown mutation `{other}`")),
        }
    }
}
