# Training presets keyed by experiment; values fill unset TrainingConfig fields
TRAINING_PRESETS = {
    # flat -> Bell on the standard grid
    "bell": {
        "eta_zeta": 1.25e-5,
        "max_epochs": 200,
        "trainable": {"zeta": True, "eps": False, "kk": False},
    },
    # GHZ size bootstrapping, same rate as the 2-qubit run
    "ghz-bootstrap": {
        "eta_zeta": 1.25e-5,
        "max_epochs": 100,
        "trainable": {"zeta": True, "eps": False, "kk": False},
    },
    # broken paths Y, Y', X', V, V'
    "broken-path": {
        "eta_zeta": 1.25e-5,
        "eta_eps": 5e-6,
        "max_epochs": 50,
        "trainable": {"zeta": True, "eps": True, "kk": False},
    },
    # first 3-qubit leg X needs twice the epochs
    "broken-path-slow": {
        "eta_zeta": 1.25e-5,
        "eta_eps": 5e-6,
        "max_epochs": 100,
        "trainable": {"zeta": True, "eps": True, "kk": False},
    },
    # 3-qubit W legs
    "w3": {
        "eta_zeta": 6.25e-6,
        "eta_eps": 2.5e-6,
        "max_epochs": 50,
        "trainable": {"zeta": True, "eps": True, "kk": False},
    },
    # single monotone S_w function; endpoint gradients sum over every step,
    # so their rates are the per-step rates divided by T
    "monotone": {
        "eta_zeta": 6.25e-9,
        "eta_eps": 2.5e-9,
        "eta_increment": 1e-3,
        "max_epochs": 1000,
        "trainable": {"zeta": True, "eps": False, "kk": False},
    },
}

DEFAULT_PRESET = "bell"

# preset used when an experiment kind names none
KIND_PRESETS = {
    "anneal-train": "bell",
    "size-bootstrap": "ghz-bootstrap",
    "broken-path": "broken-path",
    "noise-mc": "bell",
    "monotone": "monotone",
}
