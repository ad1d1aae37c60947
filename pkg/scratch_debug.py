import numpy as np

from daepov import add_noise, estimate_noise, scaled_spectrum, simulate_noise_free
from daepov.casestudies import two_tank
from daepov.dipca import _run_iteration, _column_sigmas, _scaled_eig
from daepov.lagstack import build_lag_matrix

sys_tt, src_tt = two_tank()
traj = simulate_noise_free(sys_tt, src_tt, n_total=2047, burn_in=500, seed=11)
meas = add_noise(traj, snr=(5.0, 2.0, 3.0), seed=12)
X = meas.data
print("true sigmas:", meas.true_sigmas)

Z = build_lag_matrix(X, 5, center=True).entries
gram = Z.T @ Z
std = X.std(axis=1)

for d in (12, 11, 10, 9):
    sig, iters, conv, svals = _run_iteration(gram, 3, d, 0.1 * std, std, 1e-6, 200)
    print(f"d={d} conv={conv} iters={iters} sig={np.round(sig, 4)}")
    print("   spectrum:", np.round(svals, 3))

# what does the spectrum look like with TRUE sigmas?
svals, _ = _scaled_eig(gram, _column_sigmas(meas.true_sigmas, 6))
print("true-sigma spectrum:", np.round(svals, 3))
