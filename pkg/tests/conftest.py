from hypothesis import HealthCheck, settings

settings.register_profile(
    "arfs",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("arfs")
