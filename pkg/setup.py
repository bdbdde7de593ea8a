from setuptools import Extension, setup

# The C accelerator is optional: if it fails to build, the package falls back
# to the pure-Python field core with identical semantics.
setup(
    ext_modules=[
        Extension(
            "stepplace._fieldcore",
            sources=["src/stepplace/_fieldcore.c"],
            optional=True,
        )
    ]
)
