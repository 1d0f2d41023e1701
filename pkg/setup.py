import os.path
from setuptools import setup


this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    LONG_DESCRIPTION = f.read()


def get_scm_config():
    """
    We use this function as a hook to generate version.py before building.
    """
    import textwrap
    import subprocess
    import pathlib
    import setuptools_scm

    version = setuptools_scm.get_version()
    try:
        gitrev = subprocess.check_output('git rev-parse --short HEAD'.split(),
                                         encoding='utf-8')
        gitrev = gitrev.strip()
    except (subprocess.CalledProcessError, OSError):
        gitrev = "__UNKNOWN__"

    version_py = pathlib.Path('.').joinpath('policy_dyn', 'version.py')
    version_py.write_text(textwrap.dedent(f"""
        # automatically generated by setup.py:get_scm_config()
        __version__ = "{version}"
        __git_revision__ = "{gitrev}"
    """))

    return {}  # use the default config


INSTALL_REQUIREMENTS = [
    "numpy>=1.17",
    "attrs",
    "py",
    "packaging",
    "filelock",
]

DEV_REQUIREMENTS = [
    "pytest",
    "pytest-xdist",
    "hypothesis",
]

setup(
    name="policy-dyn",
    license='MIT',
    description='Policy regret, policy equilibria and learning dynamics in repeated bimatrix games',
    long_description=LONG_DESCRIPTION,
    long_description_content_type='text/markdown',
    packages=['policy_dyn', 'policy_dyn.harness'],
    include_package_data=True,
    extras_require={
        "dev": DEV_REQUIREMENTS,
    },
    entry_points={
        "console_scripts": [
            "policy-dyn = policy_dyn.harness.__main__:main",
        ],
    },
    use_scm_version=get_scm_config,
    setup_requires=['setuptools_scm'],
    install_requires=INSTALL_REQUIREMENTS,
    python_requires='>=3.8',
)
