import numpy as np


def random_rotation(seed):
    """Uniformly random proper rotation (QR of a Gaussian matrix, sign-fixed)."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


# criterion number -> (passed, one-line detail), filled by test_acceptance
ACCEPTANCE = {}
