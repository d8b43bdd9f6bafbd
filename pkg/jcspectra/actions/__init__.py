"""
jcspectra.actions - Action scripts submodule

This submodule contains individual Python scripts that can be executed
both standalone and as subcommands through the jcspec dispatcher.

Each action script follows a standard pattern:
- Has a main() function that performs the core work
- Can be run standalone with `python -m jcspectra.actions.{action_name}`
- Can be imported as a module
- Accepts optional args parameter for argument injection
- Exits 0 on pass, 1 on a failed criterion and 2 on usage or config errors
"""
