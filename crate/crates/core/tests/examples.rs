//! Every example runs to completion.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        #[path = $path]
        mod $name;

        #[test]
        fn $name() {
            $name::run().expect(concat!(stringify!($name), " should run"));
        }
    };
}

example!(travelling_wave, "../examples/travelling_wave.rs");
example!(spectral_gap, "../examples/spectral_gap.rs");
example!(front_tracking, "../examples/front_tracking.rs");
example!(heterogeneous_decay, "../examples/heterogeneous_decay.rs");
example!(entire_solution, "../examples/entire_solution.rs");
example!(dead_zone, "../examples/dead_zone.rs");
example!(mapped_domain, "../examples/mapped_domain.rs");
example!(channel_front, "../examples/channel_front.rs");
example!(supersolution, "../examples/supersolution.rs");
example!(widening_channel, "../examples/widening_channel.rs");
example!(run_config, "../examples/run_config.rs");
