# Selective answering: rank questions by uncertainty, reject the most
# uncertain, and watch accuracy climb.  Compares a sharp uncertainty
# signal, a noisy one, and random scores against the oracle.

import numpy as np

from spectral_uq import arc_curve, auarc, auroc, oracle_curve

rng = np.random.default_rng(11)
n = 400
correct = rng.uniform(size=n) < 0.55

def noisy_uncertainty(noise):
    # incorrect answers tend to score higher, blurred by noise
    return np.where(correct, 0.3, 0.7) + noise * rng.standard_normal(n)

ids = [f"q{i:04d}" for i in range(n)]
oracle = oracle_curve(correct)
print(f"base accuracy: {correct.mean():.3f}")
print(f"{'signal':>12} {'auarc':>8} {'auroc':>8}")
print(f"{'oracle':>12} {auarc(oracle):>8.4f} {'1.0000':>8}")
for name, noise in [("sharp", 0.05), ("noisy", 0.35), ("random", 1e6)]:
    u = noisy_uncertainty(noise)
    curve = arc_curve(u, correct, question_ids=ids)
    print(f"{name:>12} {auarc(curve):>8.4f} {auroc(u, correct):>8.4f}")

# a few points along the sharp curve: accuracy vs rejection fraction
u = noisy_uncertainty(0.05)
curve = arc_curve(u, correct, question_ids=ids)
print("\nrejection -> accuracy (sharp signal):")
for k in [0, n // 4, n // 2, 3 * n // 4]:
    print(f"  {curve.fractions[k]:.2f} -> {curve.accuracies[k]:.3f}")
