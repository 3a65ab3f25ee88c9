"""Continuous-control agents over the environment's flat observation and
action vectors: soft actor-critic (primary), DDPG and TD3 baselines, and a
uniform random policy.

All agents share one loop contract: ``act(obs, t)`` returns an action in
[-1, 1]^dim, ``observe(s, a, r, s2)`` stores a transition (the caller
decides whether a transition is stored at all, e.g. when a reward filter
discards it), and ``update(t)`` performs one gradient step once the warmup
phase is over. Every stochastic choice comes from the agent's own generator
so a (seed, config) pair replays bit-for-bit.
"""

from dataclasses import dataclass, field

import numpy as np

from .nets import Adam, DenseNet, soft_update
from .numerics import make_rng, restore_rng, rng_state

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
TANH_EPS = 1e-6


def random_action(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform action in [-1, 1]^dim."""
    return rng.uniform(-1.0, 1.0, dim)


class ReplayBuffer:
    """Fixed-capacity ring of (s, a, r, s') transitions with uniform
    without-replacement batch sampling."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        self.capacity = capacity
        self.s = np.zeros((capacity, obs_dim))
        self.a = np.zeros((capacity, act_dim))
        self.r = np.zeros(capacity)
        self.s2 = np.zeros((capacity, obs_dim))
        self.ptr = 0
        self.size = 0

    def store(self, s, a, r, s2):
        i = self.ptr
        self.s[i] = s
        self.a[i] = a
        self.r[i] = r
        self.s2[i] = s2
        self.ptr = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, rng: np.random.Generator, batch: int):
        idx = rng.choice(self.size, size=batch, replace=False)
        return self.s[idx], self.a[idx], self.r[idx], self.s2[idx]

    def get_state(self) -> dict:
        n = self.size
        return {"s": self.s[:n].copy(), "a": self.a[:n].copy(),
                "r": self.r[:n].copy(), "s2": self.s2[:n].copy(),
                "ptr": self.ptr, "size": n}

    def set_state(self, st: dict):
        n = int(st["size"])
        self.s[:n] = st["s"]
        self.a[:n] = st["a"]
        self.r[:n] = st["r"]
        self.s2[:n] = st["s2"]
        self.ptr = int(st["ptr"])
        self.size = n


@dataclass(frozen=True)
class SacConfig:
    gamma: float = 0.99
    lr: float = 1e-3
    batch: int = 16
    tau_soft: float = 0.005
    entropy_alpha: float = 0.2
    auto_entropy: bool = True
    target_entropy: float = None   # default: -action_dim
    buffer_capacity: int = 100_000
    warmup_steps: int = 1000
    hidden: tuple = (128, 128)
    # Average-reward variant for gamma = 1.0: subtract the running mean of
    # stored rewards from the bootstrap target to keep it bounded.
    reward_baseline: bool = False

    def __post_init__(self):
        # gamma = 0 is allowed as a degenerate case (no bootstrapping)
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.lr <= 0 or self.batch < 1:
            raise ValueError("lr must be > 0 and batch >= 1")


@dataclass(frozen=True)
class DdpgConfig:
    gamma: float = 0.99
    lr: float = 1e-3
    batch: int = 16
    tau_soft: float = 0.005
    buffer_capacity: int = 100_000
    warmup_steps: int = 1000
    hidden: tuple = (128, 128)
    expl_noise: float = 0.1
    reward_baseline: bool = False


@dataclass(frozen=True)
class Td3Config(DdpgConfig):
    policy_noise: float = 0.2
    noise_clip: float = 0.5
    policy_delay: int = 2


def _adam_state(opt: Adam) -> dict:
    return {"t": opt.t, "m": [m.copy() for m in opt.m],
            "v": [v.copy() for v in opt.v]}


def _adam_restore(opt: Adam, st: dict):
    opt.t = int(st["t"])
    for dst, src in zip(opt.m, st["m"]):
        dst[...] = src
    for dst, src in zip(opt.v, st["v"]):
        dst[...] = src


class RandomAgent:
    """Chooses uniform random actions; never learns."""

    def __init__(self, obs_dim: int, act_dim: int, seed: int = 0):
        self.act_dim = act_dim
        self.rng = make_rng(seed)

    def act(self, obs, t: int, deterministic: bool = False):
        return random_action(self.rng, self.act_dim)

    def observe(self, s, a, r, s2):
        pass

    def update(self, t: int):
        return None

    def get_state(self) -> dict:
        return {"rng": rng_state(self.rng)}

    def set_state(self, st: dict):
        self.rng = restore_rng(st["rng"])


class SacAgent:
    """Soft actor-critic with twin critics, target critics, squashed
    Gaussian policy, and automatic entropy-temperature tuning."""

    def __init__(self, obs_dim: int, act_dim: int, cfg: SacConfig = None,
                 seed: int = 0):
        cfg = cfg or SacConfig()
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.rng = make_rng(seed)
        hid = list(cfg.hidden)
        self.policy = DenseNet([obs_dim] + hid + [2 * act_dim], self.rng)
        self.q1 = DenseNet([obs_dim + act_dim] + hid + [1], self.rng)
        self.q2 = DenseNet([obs_dim + act_dim] + hid + [1], self.rng)
        self.q1_target = self.q1.copy()
        self.q2_target = self.q2.copy()
        self.opt_policy = Adam(self.policy.params, cfg.lr)
        self.opt_q1 = Adam(self.q1.params, cfg.lr)
        self.opt_q2 = Adam(self.q2.params, cfg.lr)
        self.log_alpha = np.array([np.log(cfg.entropy_alpha)])
        self.opt_alpha = Adam([self.log_alpha], cfg.lr)
        self.target_entropy = (cfg.target_entropy if cfg.target_entropy
                               is not None else -float(act_dim))
        self.buffer = ReplayBuffer(cfg.buffer_capacity, obs_dim, act_dim)
        self._reward_sum = 0.0
        self._reward_count = 0

    @property
    def entropy_alpha(self) -> float:
        return float(np.exp(self.log_alpha[0]))

    def _policy_stats(self, s):
        """Mean and clamped log-std heads for a batch of states."""
        out, cache = self.policy.forward_cache(s)
        mu = out[:, :self.act_dim]
        log_std_raw = out[:, self.act_dim:]
        log_std = np.clip(log_std_raw, LOG_STD_MIN, LOG_STD_MAX)
        return mu, log_std, log_std_raw, cache

    @staticmethod
    def _squash(mu, log_std, eps):
        """Reparameterized squashed-Gaussian sample and its log-density.

        The log-density carries the tanh change-of-variables correction
        -log(1 - a^2 + eps) per dimension.
        """
        std = np.exp(log_std)
        u = mu + std * eps
        a = np.tanh(u)
        logp = np.sum(-0.5 * eps ** 2 - log_std - 0.5 * np.log(2.0 * np.pi)
                      - np.log(1.0 - a ** 2 + TANH_EPS), axis=1, keepdims=True)
        return a, logp, std, u

    def act(self, obs, t: int, deterministic: bool = False):
        if not deterministic and t < self.cfg.warmup_steps:
            return random_action(self.rng, self.act_dim)
        mu, log_std, _, _ = self._policy_stats(np.asarray(obs)[None, :])
        if deterministic:
            return np.tanh(mu[0])
        eps = self.rng.standard_normal((1, self.act_dim))
        a, _, _, _ = self._squash(mu, log_std, eps)
        return a[0]

    def observe(self, s, a, r, s2):
        self.buffer.store(s, a, r, s2)
        self._reward_sum += r
        self._reward_count += 1

    def _baseline(self) -> float:
        if not self.cfg.reward_baseline or self._reward_count == 0:
            return 0.0
        return self._reward_sum / self._reward_count

    def critic_target(self, s2, r, eps2=None):
        """Bootstrapped target: r + gamma * (min of the two target critics
        at a fresh policy action, minus the entropy term)."""
        cfg = self.cfg
        mu2, log_std2, _, _ = self._policy_stats(s2)
        if eps2 is None:
            eps2 = self.rng.standard_normal(mu2.shape)
        a2, logp2, _, _ = self._squash(mu2, log_std2, eps2)
        x2 = np.concatenate([s2, a2], axis=1)
        qt = np.minimum(self.q1_target.forward(x2), self.q2_target.forward(x2))
        r_col = np.asarray(r, dtype=float).reshape(-1, 1) - self._baseline()
        return r_col + cfg.gamma * (qt - self.entropy_alpha * logp2)

    def update_critics(self, s, a, r, s2, eps2=None):
        U = self.critic_target(s2, r, eps2)
        x = np.concatenate([s, a], axis=1)
        losses = []
        for q, opt in ((self.q1, self.opt_q1), (self.q2, self.opt_q2)):
            pred, cache = q.forward_cache(x)
            diff = pred - U
            losses.append(float(np.mean(diff ** 2)))
            grads, _ = q.backward(cache, 2.0 * diff / diff.shape[0])
            opt.step(q.params, grads)
        return U, losses

    def update_policy(self, s, eps=None):
        """One gradient step on mean(alpha * logp - min_i Q_i(s, a)) with a
        reparameterized action; value gradients flow through the action
        input of whichever critic attains the minimum per sample."""
        M = s.shape[0]
        mu, log_std, log_std_raw, cache = self._policy_stats(s)
        if eps is None:
            eps = self.rng.standard_normal(mu.shape)
        a, logp, std, _ = self._squash(mu, log_std, eps)
        x = np.concatenate([s, a], axis=1)
        p1, c1 = self.q1.forward_cache(x)
        p2, c2 = self.q2.forward_cache(x)
        take1 = p1 <= p2
        qmin = np.where(take1, p1, p2)
        alpha = self.entropy_alpha
        loss = float(np.mean(alpha * logp - qmin))

        _, gx1 = self.q1.backward(c1, np.where(take1, 1.0, 0.0))
        _, gx2 = self.q2.backward(c2, np.where(take1, 0.0, 1.0))
        dq_da = (gx1 + gx2)[:, self.obs_dim:]

        one_m_a2 = 1.0 - a ** 2
        corr = 2.0 * a * one_m_a2 / (one_m_a2 + TANH_EPS)
        g_u = alpha * corr - dq_da * one_m_a2
        g_mu = g_u / M
        clamp_mask = ((log_std_raw > LOG_STD_MIN) & (log_std_raw < LOG_STD_MAX))
        g_log_std = (g_u * std * eps - alpha) / M * clamp_mask
        grads, _ = self.policy.backward(
            cache, np.concatenate([g_mu, g_log_std], axis=1))
        self.opt_policy.step(self.policy.params, grads)
        return loss, logp

    def update_temperature(self, logp):
        g = -float(np.mean(logp + self.target_entropy))
        self.opt_alpha.step([self.log_alpha], [np.array([g])])

    def update(self, t: int):
        cfg = self.cfg
        if t < cfg.warmup_steps:
            return None
        if self.buffer.size < cfg.batch:
            return {"warning": "batch underflow"}
        s, a, r, s2 = self.buffer.sample(self.rng, cfg.batch)
        U, critic_losses = self.update_critics(s, a, r, s2)
        policy_loss, logp = self.update_policy(s)
        if cfg.auto_entropy:
            self.update_temperature(logp)
        soft_update(self.q1_target, self.q1, cfg.tau_soft)
        soft_update(self.q2_target, self.q2, cfg.tau_soft)
        return {"critic_losses": critic_losses, "policy_loss": policy_loss,
                "entropy_alpha": self.entropy_alpha,
                "target_mean": float(np.mean(U))}

    def get_state(self) -> dict:
        return {
            "nets": {name: [p.copy() for p in net.params]
                     for name, net in self._net_map().items()},
            "opts": {name: _adam_state(opt)
                     for name, opt in self._opt_map().items()},
            "log_alpha": self.log_alpha.copy(),
            "rng": rng_state(self.rng),
            "buffer": self.buffer.get_state(),
            "reward_sum": self._reward_sum,
            "reward_count": self._reward_count,
        }

    def set_state(self, st: dict):
        for name, net in self._net_map().items():
            net.set_params(st["nets"][name])
        for name, opt in self._opt_map().items():
            _adam_restore(opt, st["opts"][name])
        self.log_alpha[...] = st["log_alpha"]
        self.rng = restore_rng(st["rng"])
        self.buffer.set_state(st["buffer"])
        self._reward_sum = float(st["reward_sum"])
        self._reward_count = int(st["reward_count"])

    def _net_map(self):
        return {"policy": self.policy, "q1": self.q1, "q2": self.q2,
                "q1_target": self.q1_target, "q2_target": self.q2_target}

    def _opt_map(self):
        return {"policy": self.opt_policy, "q1": self.opt_q1,
                "q2": self.opt_q2, "alpha": self.opt_alpha}


class DdpgAgent:
    """Deterministic actor with one critic, additive Gaussian exploration
    noise, and target networks."""

    n_critics = 1

    def __init__(self, obs_dim: int, act_dim: int, cfg: DdpgConfig = None,
                 seed: int = 0):
        cfg = cfg or DdpgConfig()
        self.cfg = cfg
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.rng = make_rng(seed)
        hid = list(cfg.hidden)
        self.actor = DenseNet([obs_dim] + hid + [act_dim], self.rng)
        self.critics = [DenseNet([obs_dim + act_dim] + hid + [1], self.rng)
                        for _ in range(self.n_critics)]
        self.actor_target = self.actor.copy()
        self.critic_targets = [q.copy() for q in self.critics]
        self.opt_actor = Adam(self.actor.params, cfg.lr)
        self.opt_critics = [Adam(q.params, cfg.lr) for q in self.critics]
        self.buffer = ReplayBuffer(cfg.buffer_capacity, obs_dim, act_dim)
        self.n_updates = 0
        self._reward_sum = 0.0
        self._reward_count = 0

    def _policy_action(self, net: DenseNet, s):
        return np.tanh(net.forward(s))

    def _baseline(self) -> float:
        if not self.cfg.reward_baseline or self._reward_count == 0:
            return 0.0
        return self._reward_sum / self._reward_count

    def act(self, obs, t: int, deterministic: bool = False):
        if not deterministic and t < self.cfg.warmup_steps:
            return random_action(self.rng, self.act_dim)
        a = self._policy_action(self.actor, np.asarray(obs)[None, :])[0]
        if deterministic or self.cfg.expl_noise == 0.0:
            return a
        noise = self.cfg.expl_noise * self.rng.standard_normal(self.act_dim)
        return np.clip(a + noise, -1.0, 1.0)

    def observe(self, s, a, r, s2):
        self.buffer.store(s, a, r, s2)
        self._reward_sum += r
        self._reward_count += 1

    def _target_action(self, s2):
        return self._policy_action(self.actor_target, s2)

    def critic_target_value(self, s2, r):
        a2 = self._target_action(s2)
        x2 = np.concatenate([s2, a2], axis=1)
        qt = self.critic_targets[0].forward(x2)
        for q in self.critic_targets[1:]:
            qt = np.minimum(qt, q.forward(x2))
        r_col = np.asarray(r, dtype=float).reshape(-1, 1) - self._baseline()
        return r_col + self.cfg.gamma * qt

    def _update_actor(self, s):
        M = s.shape[0]
        out, cache = self.actor.forward_cache(s)
        a = np.tanh(out)
        x = np.concatenate([s, a], axis=1)
        q = self.critics[0]
        pred, qc = q.forward_cache(x)
        _, gx = q.backward(qc, np.full_like(pred, -1.0 / M))
        g_out = gx[:, self.obs_dim:] * (1.0 - a ** 2)
        grads, _ = self.actor.backward(cache, g_out)
        self.opt_actor.step(self.actor.params, grads)
        return float(-np.mean(pred))

    def update(self, t: int):
        cfg = self.cfg
        if t < cfg.warmup_steps:
            return None
        if self.buffer.size < cfg.batch:
            return {"warning": "batch underflow"}
        s, a, r, s2 = self.buffer.sample(self.rng, cfg.batch)
        U = self.critic_target_value(s2, r)
        x = np.concatenate([s, a], axis=1)
        losses = []
        for q, opt in zip(self.critics, self.opt_critics):
            pred, cache = q.forward_cache(x)
            diff = pred - U
            losses.append(float(np.mean(diff ** 2)))
            grads, _ = q.backward(cache, 2.0 * diff / diff.shape[0])
            opt.step(q.params, grads)
        self.n_updates += 1
        diag = {"critic_losses": losses, "actor_updated": False}
        if self._actor_due():
            diag["policy_loss"] = self._update_actor(s)
            diag["actor_updated"] = True
            soft_update(self.actor_target, self.actor, cfg.tau_soft)
            for qt, q in zip(self.critic_targets, self.critics):
                soft_update(qt, q, cfg.tau_soft)
        return diag

    def _actor_due(self) -> bool:
        return True

    def get_state(self) -> dict:
        nets = {"actor": self.actor, "actor_target": self.actor_target}
        nets.update({f"q{i}": q for i, q in enumerate(self.critics)})
        nets.update({f"q{i}_target": q
                     for i, q in enumerate(self.critic_targets)})
        opts = {"actor": self.opt_actor}
        opts.update({f"q{i}": o for i, o in enumerate(self.opt_critics)})
        return {
            "nets": {k: [p.copy() for p in n.params] for k, n in nets.items()},
            "opts": {k: _adam_state(o) for k, o in opts.items()},
            "rng": rng_state(self.rng),
            "buffer": self.buffer.get_state(),
            "n_updates": self.n_updates,
            "reward_sum": self._reward_sum,
            "reward_count": self._reward_count,
        }

    def set_state(self, st: dict):
        nets = {"actor": self.actor, "actor_target": self.actor_target}
        nets.update({f"q{i}": q for i, q in enumerate(self.critics)})
        nets.update({f"q{i}_target": q
                     for i, q in enumerate(self.critic_targets)})
        for k, n in nets.items():
            n.set_params(st["nets"][k])
        _adam_restore(self.opt_actor, st["opts"]["actor"])
        for i, o in enumerate(self.opt_critics):
            _adam_restore(o, st["opts"][f"q{i}"])
        self.rng = restore_rng(st["rng"])
        self.buffer.set_state(st["buffer"])
        self.n_updates = int(st["n_updates"])
        self._reward_sum = float(st["reward_sum"])
        self._reward_count = int(st["reward_count"])


class Td3Agent(DdpgAgent):
    """Twin critics, target-policy smoothing noise, and delayed actor
    updates on top of the DDPG skeleton."""

    n_critics = 2

    def __init__(self, obs_dim: int, act_dim: int, cfg: Td3Config = None,
                 seed: int = 0):
        super().__init__(obs_dim, act_dim, cfg or Td3Config(), seed)

    def _target_action(self, s2):
        a2 = self._policy_action(self.actor_target, s2)
        cfg = self.cfg
        noise = np.clip(cfg.policy_noise * self.rng.standard_normal(a2.shape),
                        -cfg.noise_clip, cfg.noise_clip)
        return np.clip(a2 + noise, -1.0, 1.0)

    def _actor_due(self) -> bool:
        return self.n_updates % self.cfg.policy_delay == 0
