#include <cstdio>

int main() {
  std::puts("enfgrid: placeholder");
  return 0;
}
