#include <cstdio>

int main() {
  std::puts("axdse: placeholder");
  return 0;
}
