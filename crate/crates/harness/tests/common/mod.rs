#![allow(dead_code)]

pub const LINEAR_HEAT: &str = r#"
seed = 3

[grid]
n = 32

[physics]
alpha = 0.25

[analysis]
s = 1.6
probe_every = 0.05

[stepper]
t_end = 0.5
mode = "linear-heat"
dt = { kind = "fixed", dt = 0.01 }

[data]
kind = "band-limited-random"
min_freq = 1.0
max_freq = 8.0
normalize = { s = 1.6, value = 1.0 }
"#;

pub const TWIN: &str = r#"
seed = 5

[grid]
n = 64

[physics]
alpha = 0.25

[analysis]
s = 1.6
probe_every = 0.01

[stepper]
t_end = 0.3
dt = { kind = "cfl", safety = 0.4, dt_max = 0.005 }

[data]
kind = "band-limited-random"
min_freq = 1.0
max_freq = 4.0
normalize = { s = 1.6, value = 2.0 }

[twin]
j = 3
perturbation = { kind = "single-shell", j = 4, amplitude = 1e-6 }

[constants]
cstar = { value = 1.0 }
"#;

/// Perturbation straddling the dynamic cutoff; the low/high ratio starts
/// below c_* and overtakes it once dissipation thins the high band.
pub const TWIN_CROSSING: &str = r#"
seed = 5

[grid]
n = 64

[physics]
alpha = 0.5

[analysis]
s = 1.2
probe_every = 0.01

[stepper]
t_end = 0.3
dt = { kind = "cfl", safety = 0.4, dt_max = 0.005 }

[data]
kind = "band-limited-random"
min_freq = 1.0
max_freq = 4.0
normalize = { s = 1.2, value = 2.0 }

[twin]
j = 3
perturbation = { kind = "band-limited-random", min_freq = 2.0, max_freq = 20.0, slope = -2.0, amplitude = 1e-6 }

[constants]
cstar = { value = 4.0 }
"#;
