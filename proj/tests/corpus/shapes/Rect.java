package shapes;

public class Rect implements Movable, Scalable {
  private int w;
  private int h;
  private int x;
  private int y;

  public Rect(int w, int h) {
    this.w = w;
    this.h = h;
  }

  public int area() {
    return this.w * this.h;
  }

  public str label() {
    return "rect";
  }

  public void move(int dx, int dy) {
    this.x = this.x + dx;
    this.y = this.y + dy;
  }

  public void scale(int factor) {
    this.w = this.w * factor;
    this.h = this.h * factor;
  }

  public int clampedArea(int lo, int hi) {
    int a = this.area();
    while (a > hi && a > lo) {
      if (this.w > this.h) {
        this.w = this.w - 1;
      } else {
        this.h = this.h - 1;
      }
      a = this.area();
    }
    return a;
  }
}
