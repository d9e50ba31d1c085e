// CLI driver; subcommands are filled in as the library grows.
#include <cstdio>

int main() {
  std::puts("sigret: no command given");
  return 64;
}
