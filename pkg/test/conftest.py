from hypothesis import settings

# a special configuration that is more reproducible
settings.register_profile(
    "build",
    deadline=None,
    derandomize=True,
    max_examples=100,
)
# exact arithmetic over many degrees is slow; keep the default runs small
settings.register_profile("exact", deadline=None, max_examples=25)
settings.load_profile("exact")
