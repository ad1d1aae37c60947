"""Scratch prototype: validate two-tank + RC numerics before writing tests."""
import time

import numpy as np

from daepov import (
    add_noise,
    build_constraint_matrix,
    discover,
    DiscoverOptions,
    estimate_noise,
    ground_truth_partitions,
    scaled_spectrum,
    count_unity,
    simulate_noise_free,
)
from daepov.casestudies import feedback_example, rc_circuit, two_tank

# ---- oracle checks -------------------------------------------------------
sys_tt, src_tt = two_tank()
A = build_constraint_matrix(sys_tt)
print("two-tank A:\n", A.entries)
parts = ground_truth_partitions(A)
for p in parts:
    print(p)

sys_fb, _ = feedback_example(2.0)
Afb = build_constraint_matrix(sys_fb)
print("feedback A^i:\n", Afb.instantaneous)
for p in ground_truth_partitions(Afb):
    print(p)

sys_rc, src_rc = rc_circuit()
Arc = build_constraint_matrix(sys_rc)
print("rc A:\n", Arc.entries)
for p in ground_truth_partitions(Arc):
    print(p)

# ---- two-tank single run --------------------------------------------------
t0 = time.time()
traj = simulate_noise_free(sys_tt, src_tt, n_total=2047, burn_in=500, seed=11)
print("traj var:", traj.data.var(axis=1))  # expect ~ (1.0, 0.82, 0.147)
meas = add_noise(traj, snr=(5.0, 2.0, 3.0), seed=12)  # F0,h1,h2 -> snr 5,2,3
print("true sigmas^2:", meas.true_sigmas**2)  # expect ~ (0.2, 0.41, 0.049)

noise = estimate_noise(meas.data, L=5)
print("d_used:", noise.d_used, "iters:", noise.iterations, "converged:", noise.converged)
print("est sigmas^2:", noise.sigmas**2)
b0 = scaled_spectrum(meas.data, 0, noise)
b1 = scaled_spectrum(meas.data, 1, noise)
b5 = scaled_spectrum(meas.data, 5, noise)
print("L=0 spec:", b0.singular_values)
print("L=1 spec:", b1.singular_values)
print("L=5 spec:", np.round(b5.singular_values, 3))
print("counts:", count_unity(b0.singular_values), count_unity(b1.singular_values), count_unity(b5.singular_values))

rep = discover(meas.data, names=("z3", "z1", "z2"), options=DiscoverOptions(lag_max=5))
print("structure:", rep.structure)
for p in rep.partitions:
    print("  dep", [rep.names[i] for i in p.dependent], "cond", round(p.cond, 3), "adm", p.admissible)
print("sources:", [rep.names[i] for i in rep.sources.unambiguous], [rep.names[i] for i in rep.sources.ambiguous])
print("one two-tank run:", round(time.time() - t0, 2), "s")

# ---- RC single run ---------------------------------------------------------
t0 = time.time()
traj = simulate_noise_free(sys_rc, src_rc, n_total=1000, burn_in=500, seed=21)
print("rc traj var:", traj.data.var(axis=1))
meas = add_noise(traj, snr=(5.0, 4.0, 6.0, 8.0), seed=22)
rep = discover(meas.data, options=DiscoverOptions(lag_max=2))
print("rc structure:", rep.structure)
for p in rep.partitions:
    print("  dep", [rep.names[i] for i in p.dependent], "cond", round(p.cond, 3), "adm", p.admissible)
print("rc sources: unamb", rep.sources.unambiguous, "amb", rep.sources.ambiguous)
print("one rc run:", round(time.time() - t0, 2), "s")
