package shapes;

public interface Shape {
  int area();
  str label();
}

interface Movable extends Shape {
  void move(int dx, int dy);
}

interface Scalable extends Shape {
  void scale(int factor);
}
