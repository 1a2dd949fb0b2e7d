//! Explicit-state exploration of a parsed model.
//!
//! States are numbered in discovery order. While expanding a state, the
//! probabilistic vertices of its multi-branch commands are numbered
//! first (command order), then its new successor states in ascending
//! valuation order. Successor lists are sorted by id.

use std::collections::{BTreeMap, HashMap};

use super::ast::{ModelAst, Player};
use super::eval::{eval_consts, resolve, RExpr, Scope};
use super::lexer::Pos;
use super::{CompiledGame, ModelError, StateErrorKind, StateTag};
use crate::game::{GameGraph, PlayerClass, VertexId, ROW_SUM_TOLERANCE};

#[derive(Clone, Debug, PartialEq)]
pub struct CompileOptions {
    /// Give deadlocked states a self-loop instead of failing.
    pub close_deadlocks: bool,
    pub max_vertices: usize,
    pub row_tolerance: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            close_deadlocks: false,
            max_vertices: 10_000_000,
            row_tolerance: ROW_SUM_TOLERANCE,
        }
    }
}

struct Var {
    name: String,
    lo: i64,
    hi: i64,
}

struct Branch {
    prob: Option<RExpr>,
    update: Vec<(usize, RExpr)>,
}

struct Cmd {
    label: String,
    owner: Player,
    guard: RExpr,
    branches: Vec<Branch>,
    pos: Pos,
}

struct Model {
    vars: Vec<Var>,
    init: Vec<i64>,
    commands: Vec<Cmd>,
    rewards: Vec<(RExpr, RExpr)>,
}

fn lower(ast: &ModelAst) -> Result<Model, ModelError> {
    let consts = eval_consts(&ast.consts)?;
    let no_vars = BTreeMap::new();
    let const_scope = Scope {
        consts: &consts,
        vars: &no_vars,
    };
    let mut vars = Vec::new();
    let mut init = Vec::new();
    for d in ast.vars() {
        let lo = resolve(&d.lo, &const_scope)?.eval_int(&[])?;
        let hi = resolve(&d.hi, &const_scope)?.eval_int(&[])?;
        let start = resolve(&d.init, &const_scope)?.eval_int(&[])?;
        if lo > hi {
            return Err(ModelError::Declaration {
                pos: d.pos,
                msg: format!("`{}` has an empty range [{lo}..{hi}]", d.name),
            });
        }
        if !(lo..=hi).contains(&start) {
            return Err(ModelError::Declaration {
                pos: d.pos,
                msg: format!("initial value {start} of `{}` is outside [{lo}..{hi}]", d.name),
            });
        }
        vars.push(Var {
            name: d.name.clone(),
            lo,
            hi,
        });
        init.push(start);
    }
    let slots: BTreeMap<String, usize> = vars.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
    let scope = Scope {
        consts: &consts,
        vars: &slots,
    };
    let owner: BTreeMap<&str, Player> = ast
        .players
        .iter()
        .flat_map(|d| d.labels.iter().map(move |(l, _)| (l.as_str(), d.player)))
        .collect();
    let mut commands = Vec::new();
    for c in ast.commands() {
        let mut branches = Vec::new();
        for b in &c.branches {
            let prob = b.prob.as_ref().map(|p| resolve(p, &scope)).transpose()?;
            let mut update = Vec::new();
            for a in &b.update {
                let slot = *slots.get(&a.var).ok_or_else(|| ModelError::Eval {
                    pos: a.pos,
                    msg: format!("unknown variable `{}`", a.var),
                })?;
                update.push((slot, resolve(&a.value, &scope)?));
            }
            branches.push(Branch { prob, update });
        }
        commands.push(Cmd {
            label: c.label.clone(),
            owner: owner[c.label.as_str()],
            guard: resolve(&c.guard, &scope)?,
            branches,
            pos: c.pos,
        });
    }
    let rewards = ast
        .rewards
        .iter()
        .map(|r| Ok((resolve(&r.guard, &scope)?, resolve(&r.value, &scope)?)))
        .collect::<Result<_, ModelError>>()?;
    Ok(Model {
        vars,
        init,
        commands,
        rewards,
    })
}

enum Outcome {
    Direct(Vec<i64>),
    Split(Vec<(Vec<i64>, f64)>),
}

struct Builder<'m> {
    model: &'m Model,
    opts: &'m CompileOptions,
    index: HashMap<Vec<i64>, VertexId>,
    tags: Vec<StateTag>,
    class: Vec<PlayerClass>,
    succ: Vec<Vec<(VertexId, f64)>>,
    reward: Vec<f64>,
}

impl<'m> Builder<'m> {
    fn describe(&self, val: &[i64]) -> String {
        let parts: Vec<String> = self
            .model
            .vars
            .iter()
            .zip(val)
            .map(|(v, x)| format!("{}={x}", v.name))
            .collect();
        format!("({})", parts.join(", "))
    }

    fn state_err(&self, val: &[i64], kind: StateErrorKind) -> ModelError {
        ModelError::State {
            state: self.describe(val),
            kind,
        }
    }

    /// Attaches the offending state to evaluation errors.
    fn in_state<T>(&self, val: &[i64], r: Result<T, ModelError>) -> Result<T, ModelError> {
        r.map_err(|e| match e {
            ModelError::Eval { pos, msg } => ModelError::Eval {
                pos,
                msg: format!("{msg} in state {}", self.describe(val)),
            },
            other => other,
        })
    }

    fn push(&mut self, tag: StateTag) -> Result<VertexId, ModelError> {
        if self.tags.len() >= self.opts.max_vertices {
            return Err(ModelError::TooLarge {
                limit: self.opts.max_vertices,
            });
        }
        let id = VertexId(self.tags.len());
        self.tags.push(tag);
        self.class.push(PlayerClass::Prob);
        self.succ.push(Vec::new());
        self.reward.push(0.0);
        Ok(id)
    }

    fn outcome(&self, val: &[i64], cmd: &Cmd) -> Result<Outcome, ModelError> {
        let mut merged: Vec<(Vec<i64>, f64)> = Vec::new();
        for b in &cmd.branches {
            let p = match &b.prob {
                Some(e) => self.in_state(val, e.eval_real(val))?,
                None => 1.0,
            };
            if !p.is_finite() || p < 0.0 {
                return Err(self.state_err(
                    val,
                    StateErrorKind::BadProbability {
                        label: cmd.label.clone(),
                        prob: p,
                    },
                ));
            }
            let mut next = val.to_vec();
            for (slot, e) in &b.update {
                let x = self.in_state(val, e.eval_int(val))?;
                let var = &self.model.vars[*slot];
                if !(var.lo..=var.hi).contains(&x) {
                    return Err(self.state_err(
                        val,
                        StateErrorKind::OutOfRange {
                            label: cmd.label.clone(),
                            var: var.name.clone(),
                            value: x,
                        },
                    ));
                }
                next[*slot] = x;
            }
            match merged.iter_mut().find(|m| m.0 == next) {
                Some(m) => m.1 += p,
                None => merged.push((next, p)),
            }
        }
        let sum: f64 = merged.iter().map(|m| m.1).sum();
        if (sum - 1.0).abs() > self.opts.row_tolerance {
            return Err(self.state_err(
                val,
                StateErrorKind::RowSum {
                    label: cmd.label.clone(),
                    sum,
                },
            ));
        }
        merged.retain(|m| m.1 > 0.0);
        Ok(if merged.len() == 1 {
            Outcome::Direct(merged.pop().expect("one branch").0)
        } else {
            Outcome::Split(merged)
        })
    }

    fn expand(&mut self, s: VertexId) -> Result<(), ModelError> {
        let StateTag::Valuation(val) = self.tags[s.0].clone() else {
            return Ok(());
        };
        let model = self.model;
        let mut reward = 0.0;
        for (g, r) in &model.rewards {
            if self.in_state(&val, g.eval_bool(&val))? {
                reward += self.in_state(&val, r.eval_real(&val))?;
            }
        }
        if !(reward >= 0.0 && reward.is_finite()) {
            return Err(self.state_err(&val, StateErrorKind::BadReward(reward)));
        }
        self.reward[s.0] = reward;

        let mut enabled = Vec::new();
        for c in &model.commands {
            if self.in_state(&val, c.guard.eval_bool(&val))? {
                enabled.push(c);
            }
        }
        if enabled.is_empty() {
            if !self.opts.close_deadlocks {
                return Err(self.state_err(&val, StateErrorKind::Deadlock));
            }
            if reward != 0.0 {
                return Err(self.state_err(&val, StateErrorKind::TerminalReward(reward)));
            }
            self.succ[s.0] = vec![(s, 1.0)];
            return Ok(());
        }
        let owner = enabled[0].owner;
        if let Some(other) = enabled.iter().find(|c| c.owner != owner) {
            return Err(self.state_err(
                &val,
                StateErrorKind::MixedPlayers {
                    first: enabled[0].label.clone(),
                    second: other.label.clone(),
                    at: other.pos,
                },
            ));
        }
        self.class[s.0] = match owner {
            Player::One => PlayerClass::Max,
            Player::Two => PlayerClass::Min,
        };

        let outcomes: Vec<(&Cmd, Outcome)> = enabled
            .into_iter()
            .map(|c| Ok((c, self.outcome(&val, c)?)))
            .collect::<Result<_, ModelError>>()?;
        let mut splits = Vec::new();
        for (c, o) in &outcomes {
            if let Outcome::Split(rows) = o {
                let id = self.push(StateTag::Branch {
                    source: s,
                    command: c.label.clone(),
                })?;
                splits.push((id, rows));
            }
        }
        let mut fresh: Vec<&Vec<i64>> = outcomes
            .iter()
            .flat_map(|(_, o)| match o {
                Outcome::Direct(t) => vec![t],
                Outcome::Split(rows) => rows.iter().map(|r| &r.0).collect(),
            })
            .filter(|t| !self.index.contains_key(*t))
            .collect();
        fresh.sort();
        fresh.dedup();
        for t in fresh {
            let id = self.push(StateTag::Valuation(t.clone()))?;
            self.index.insert(t.clone(), id);
        }

        let mut row: Vec<VertexId> = outcomes
            .iter()
            .filter_map(|(_, o)| match o {
                Outcome::Direct(t) => Some(self.index[t]),
                Outcome::Split(_) => None,
            })
            .chain(splits.iter().map(|s| s.0))
            .collect();
        row.sort_unstable();
        row.dedup();
        self.succ[s.0] = row.into_iter().map(|w| (w, 1.0)).collect();
        if self.succ[s.0] == [(s, 1.0)] && reward != 0.0 {
            return Err(self.state_err(&val, StateErrorKind::TerminalReward(reward)));
        }
        for (id, rows) in splits {
            let mut r: Vec<(VertexId, f64)> = rows.iter().map(|(t, p)| (self.index[t], *p)).collect();
            r.sort_by_key(|e| e.0);
            self.succ[id.0] = r;
        }
        Ok(())
    }
}

pub fn compile(ast: &ModelAst, opts: &CompileOptions) -> Result<CompiledGame, ModelError> {
    let model = lower(ast)?;
    let mut b = Builder {
        model: &model,
        opts,
        index: HashMap::new(),
        tags: Vec::new(),
        class: Vec::new(),
        succ: Vec::new(),
        reward: Vec::new(),
    };
    let init = b.push(StateTag::Valuation(model.init.clone()))?;
    b.index.insert(model.init.clone(), init);
    let mut next = 0;
    while next < b.tags.len() {
        b.expand(VertexId(next))?;
        next += 1;
    }
    let game = GameGraph::new(b.class, b.succ, b.reward, init).map_err(|e| ModelError::Internal(e.to_string()))?;
    if let Some(v) = game.validate().into_iter().next() {
        return Err(ModelError::Internal(v.to_string()));
    }
    Ok(CompiledGame {
        game,
        var_names: model.vars.iter().map(|v| v.name.clone()).collect(),
        states: b.tags,
    })
}
