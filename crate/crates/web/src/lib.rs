//! Browser bindings: play a game step by step, inspect belief heatmaps and
//! score candidate hints. Every method returns a JSON string.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use hanabi_tom::belief::{slot_marginals_b0, BeliefMatrix, NestedMethod};
use hanabi_tom::card::{Card, Color};
use hanabi_tom::encoding::{encode, EncodeOptions};
use hanabi_tom::game::{legal_actions, new_game, observe, score_and_terminal, Action, GameState};
use hanabi_tom::harness::{
    derive_seed, record_turn, simulated_hint_reward, teammate_beliefs, Decision, EpisodeConfig, PolicySpec,
};
use hanabi_tom::reward::RewardConfig;

/// Game session behind the page.
pub struct Demo {
    state: GameState,
    cfg: EpisodeConfig,
    rng: ChaCha8Rng,
}

fn rows(m: &BeliefMatrix) -> Value {
    json!(m.rows().iter().map(|r| r.to_vec()).collect::<Vec<_>>())
}

impl Demo {
    pub fn new(players: usize, seed: u64, beta: f64) -> Result<Demo, String> {
        let state = new_game(players, seed).map_err(|e| e.to_string())?;
        let mut cfg = EpisodeConfig::self_play(players, seed, PolicySpec::Random);
        cfg.reward = RewardConfig::with_beta(beta);
        cfg.reward.validate().map_err(|e| e.to_string())?;
        Ok(Demo {
            state,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, 1)),
        })
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    /// Board, hands with hint marks, and the legal moves.
    pub fn view(&self) -> Value {
        let s = &self.state;
        let outcome = score_and_terminal(s);
        let hands: Vec<Value> = s
            .hands
            .iter()
            .map(|h| {
                json!(h
                    .slots
                    .iter()
                    .map(|slot| json!({"card": slot.card.to_string(), "knowledge": slot.knowledge.to_string()}))
                    .collect::<Vec<_>>())
            })
            .collect();
        let fireworks: serde_json::Map<String, Value> =
            Color::ALL.iter().map(|c| (c.to_string(), json!(s.firework(*c)))).collect();
        let legal: Vec<String> = legal_actions(s).iter().map(|a| a.to_string()).collect();
        json!({
            "players": s.num_players,
            "current_player": s.current_player,
            "turn": s.turn,
            "hands": hands,
            "fireworks": fireworks,
            "discards": s.discard_pile,
            "info_tokens": s.info_tokens,
            "life_tokens": s.life_tokens,
            "deck_size": s.draw_pile.len(),
            "score": outcome.score,
            "terminal": outcome.terminal,
            "legal": legal,
        })
    }

    fn apply(&mut self, action: Action) -> Result<Value, String> {
        let (record, next) = record_turn(&self.state, action, &self.cfg, &mut self.rng).map_err(|e| e.to_string())?;
        self.state = next;
        Ok(json!({
            "actor": record.actor,
            "action": action.to_string(),
            "extrinsic": record.extrinsic,
            "intrinsic": record.intrinsic,
            "combined": record.combined,
            "score": record.score,
            "terminal": record.terminal,
        }))
    }

    /// Lets `policy` (`random` or `belief_greedy`) move for the current player.
    pub fn step(&mut self, policy: &str) -> Result<Value, String> {
        if self.state.is_terminal() {
            return Err("game is over".into());
        }
        let spec: PolicySpec = policy.parse().map_err(|e: hanabi_tom::error::HarnessError| e.to_string())?;
        if matches!(spec, PolicySpec::External { .. }) {
            return Err("external policies are not available in the browser".into());
        }
        let seed = derive_seed(self.cfg.seed, 1000 + self.state.turn as u64);
        let mut p = spec.build(seed, NestedMethod::Map, self.cfg.reward).map_err(|e| e.to_string())?;
        let obs = observe(&self.state, self.state.current_player).map_err(|e| e.to_string())?;
        let encoded = encode(&obs, &EncodeOptions::own(), &mut self.rng).map_err(|e| e.to_string())?;
        let legal = legal_actions(&self.state);
        let action = p
            .act(&Decision {
                observation: &obs,
                encoded: &encoded,
                legal: &legal,
            })
            .map_err(|e| e.to_string())?;
        self.apply(action)
    }

    /// Plays legal move number `index` for the current player.
    pub fn play_legal(&mut self, index: usize) -> Result<Value, String> {
        let legal = legal_actions(&self.state);
        let action = *legal.get(index).ok_or_else(|| format!("no legal move {index}"))?;
        self.apply(action)
    }

    /// `viewer`'s own-hand belief and estimates of each teammate's belief.
    pub fn beliefs(&self, viewer: usize) -> Result<Value, String> {
        let obs = observe(&self.state, viewer).map_err(|e| e.to_string())?;
        let own = slot_marginals_b0(&obs).map_err(|e| e.to_string())?;
        let nested = teammate_beliefs(&obs, NestedMethod::Map, &mut ChaCha8Rng::seed_from_u64(0))
            .map_err(|e| e.to_string())?;
        let nested: serde_json::Map<String, Value> = nested.iter().map(|(j, m)| (j.to_string(), rows(m))).collect();
        Ok(json!({
            "viewer": viewer,
            "cards": Card::all().map(|c| c.to_string()).collect::<Vec<_>>(),
            "own": rows(&own),
            "nested": nested,
        }))
    }

    /// Communication reward of every hint open to the current player.
    pub fn hint_scores(&self) -> Result<Value, String> {
        let obs = observe(&self.state, self.state.current_player).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let before = teammate_beliefs(&obs, NestedMethod::Map, &mut rng).map_err(|e| e.to_string())?;
        let mut out = Vec::new();
        for (index, a) in legal_actions(&self.state).iter().enumerate() {
            if !a.is_hint() {
                continue;
            }
            let r = simulated_hint_reward(&obs, a, &before, NestedMethod::Map, &self.cfg.reward, &mut rng)
                .map_err(|e| e.to_string())?;
            out.push(json!({"index": index, "action": a.to_string(), "reward": r}));
        }
        Ok(json!(out))
    }
}

fn js_err(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub struct WebDemo(Demo);

#[wasm_bindgen]
impl WebDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(players: usize, seed: u32, beta: f64) -> Result<WebDemo, JsValue> {
        Demo::new(players, seed as u64, beta).map(WebDemo).map_err(js_err)
    }

    pub fn view(&self) -> String {
        self.0.view().to_string()
    }

    pub fn step(&mut self, policy: &str) -> Result<String, JsValue> {
        self.0.step(policy).map(|v| v.to_string()).map_err(js_err)
    }

    pub fn play_legal(&mut self, index: usize) -> Result<String, JsValue> {
        self.0.play_legal(index).map(|v| v.to_string()).map_err(js_err)
    }

    pub fn beliefs(&self, viewer: usize) -> Result<String, JsValue> {
        self.0.beliefs(viewer).map(|v| v.to_string()).map_err(js_err)
    }

    pub fn hint_scores(&self) -> Result<String, JsValue> {
        self.0.hint_scores().map(|v| v.to_string()).map_err(js_err)
    }
}
