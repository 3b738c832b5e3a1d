"""
This module exists only to make module level execution also viable.

python -m yrun

"""

from yrun.main import router

def run():
    """
    A simple wrapper over the router
    """
    router()

if __name__ == '__main__':
    run()
