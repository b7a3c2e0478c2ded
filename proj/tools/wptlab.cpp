#include <cstdio>

int main() {
  std::puts("wptlab: not wired up yet");
  return 2;
}
