from floerkit.cli import main

main()
