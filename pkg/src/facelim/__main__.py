from facelim.cli import main

main()
